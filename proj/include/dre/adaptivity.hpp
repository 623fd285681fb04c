#pragma once

#include <string>
#include <vector>

#include "dre/integrators.hpp"

namespace dre {

enum class Method { exprb2, exprb3, exprb32, exprb43 };

/// Parse one of "exprb2", "exprb3", "exprb32", "exprb43"; throws
/// SolverError on anything else.
Method parse_method(const std::string& name);
std::string method_name(Method m);
bool method_is_embedded(Method m);

/// Tolerances and controller constants.  The defaults sigma1 = 0.9,
/// sigma2 = 0.5, delta_max = 1.5, delta_min = 0.1, theta = 0.1 are the
/// working set of the step-size controller.
struct ControllerConfig {
  double Atol = 1e-6;
  double Rtol = 1e-6;
  double sigma1 = 0.9;
  double sigma2 = 0.5;
  double delta_max = 1.5;
  double delta_min = 0.1;
  double theta = 0.1;
  double h_min = 0.0;  // 0 means: derive as 1e-12 * t_end at solve time
  double h_max = 0.0;  // 0 means: derive as t_end at solve time
  int max_rejects_per_step = 20;

  void validate() const;
};

/// Record of an accepted integration run.
struct Trajectory {
  std::vector<double> times;           // accepted time points, t0 = 0 first
  std::vector<double> steps;           // accepted h_n (times.size() - 1)
  std::vector<int> reject_counts;      // rejects before each accepted step
  std::vector<double> error_estimates; // ||E_{n+1}|| per accepted step
  std::vector<Eigen::Index> ranks;     // rank of X after each accepted step
  LowRankSym final_state{0};
  std::vector<LowRankSym> states;      // optional; filled when requested

  std::size_t accepted_steps() const { return steps.size(); }
  int total_rejects() const;
};

/// Tol = Atol + max(||X_n||, ||X_trial||) * Rtol.
double tolerance(const LowRankSym& x_n, const LowRankSym& x_trial,
                 const ControllerConfig& cfg);

/// Acceptance branch: h_{n+1} = min(delta_max, sigma1 (Tol/err)^(1/(p+1))) h_n,
/// clamped to [h_min, h_max].  err = 0 uses the delta_max cap.
double next_step_accept(double h_n, double err, double tol, int p,
                        const ControllerConfig& cfg);

/// Rejection branch: h = max(delta_min, sigma2 (Tol/err)^(1/(p+1))) h_n,
/// clamped to [h_min, h_max].
double retry_step_reject(double h_n, double err, double tol, int p,
                         const ControllerConfig& cfg);

/// h_0 = theta (Tol / ||F(X0) G F(X0)||)^(1/(p+1)) with
/// Tol = Atol + ||X0|| Rtol; equilibrium start (zero denominator) gives
/// h_max.
double initial_step(const RiccatiProblem& problem, const LowRankSym& x0,
                    const ControllerConfig& cfg, int p);

/// Adaptive integration from 0 to exactly t_end with an embedded pair
/// (exprb32 or exprb43).  Throws StepControlError when h underflows or a
/// step exceeds max_rejects_per_step; the partial trajectory is carried in
/// the exception-safe out-parameter overload used by the CLI.
Trajectory solve_adaptive(const RiccatiProblem& problem, Method method,
                          const ControllerConfig& cfg, double t_end,
                          const StepConfig& step_cfg = {},
                          bool store_states = false);

/// Same driver, but on failure returns what was integrated so far and sets
/// *failure to the diagnostic instead of throwing.
Trajectory solve_adaptive_partial(const RiccatiProblem& problem, Method method,
                                  const ControllerConfig& cfg, double t_end,
                                  const StepConfig& step_cfg,
                                  bool store_states, std::string* failure);

/// Fixed uniform steps h = t_end / n_steps; no controller.  Any of the
/// four methods is allowed.
Trajectory solve_fixed(const RiccatiProblem& problem, Method method,
                       int n_steps, double t_end,
                       const StepConfig& step_cfg = {},
                       bool store_states = false);

/// Compression tolerance used by the adaptive driver:
/// max(1e-10, 0.1 * Rtol), tied to the requested accuracy so ranks stay
/// proportionate while truncation remains below the controller signal.
double driver_compression_tol(const ControllerConfig& cfg);

}  // namespace dre
