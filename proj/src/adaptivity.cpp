#include "dre/adaptivity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dre/error.hpp"

namespace dre {

Method parse_method(const std::string& name) {
  if (name == "exprb2") return Method::exprb2;
  if (name == "exprb3") return Method::exprb3;
  if (name == "exprb32") return Method::exprb32;
  if (name == "exprb43") return Method::exprb43;
  throw SolverError("unknown method '" + name +
                    "' (expected exprb2, exprb3, exprb32 or exprb43)");
}

std::string method_name(Method m) {
  switch (m) {
    case Method::exprb2: return "exprb2";
    case Method::exprb3: return "exprb3";
    case Method::exprb32: return "exprb32";
    case Method::exprb43: return "exprb43";
  }
  return "?";
}

bool method_is_embedded(Method m) {
  return m == Method::exprb32 || m == Method::exprb43;
}

void ControllerConfig::validate() const {
  if (!(Atol > 0.0) || !(Rtol > 0.0)) {
    throw SolverError("ControllerConfig: Atol and Rtol must be positive");
  }
  if (!(0.0 < delta_min && delta_min < 1.0 && 1.0 < delta_max)) {
    throw SolverError("ControllerConfig: need 0 < delta_min < 1 < delta_max");
  }
  if (!(0.0 < sigma2 && sigma2 <= sigma1 && sigma1 < 1.0)) {
    throw SolverError("ControllerConfig: need 0 < sigma2 <= sigma1 < 1");
  }
  if (h_min > h_max) {
    throw SolverError("ControllerConfig: h_min must not exceed h_max");
  }
  if (max_rejects_per_step < 1) {
    throw SolverError("ControllerConfig: max_rejects_per_step must be >= 1");
  }
}

int Trajectory::total_rejects() const {
  return std::accumulate(reject_counts.begin(), reject_counts.end(), 0);
}

double tolerance(const LowRankSym& x_n, const LowRankSym& x_trial,
                 const ControllerConfig& cfg) {
  return cfg.Atol + std::max(fro_norm(x_n), fro_norm(x_trial)) * cfg.Rtol;
}

namespace {

double clamp_h(double h, const ControllerConfig& cfg) {
  return std::min(std::max(h, cfg.h_min), cfg.h_max);
}

}  // namespace

double next_step_accept(double h_n, double err, double tol, int p,
                        const ControllerConfig& cfg) {
  double factor = cfg.delta_max;
  if (err > 0.0) {
    factor = std::min(cfg.delta_max,
                      cfg.sigma1 * std::pow(tol / err, 1.0 / (p + 1)));
  }
  return clamp_h(factor * h_n, cfg);
}

double retry_step_reject(double h_n, double err, double tol, int p,
                         const ControllerConfig& cfg) {
  const double factor = std::max(
      cfg.delta_min, cfg.sigma2 * std::pow(tol / err, 1.0 / (p + 1)));
  return clamp_h(factor * h_n, cfg);
}

double initial_step(const RiccatiProblem& problem, const LowRankSym& x0,
                    const ControllerConfig& cfg, int p) {
  const double tol = cfg.Atol + fro_norm(x0) * cfg.Rtol;
  const double fgf = fgf_norm(problem, x0);
  if (fgf == 0.0) return cfg.h_max;
  return clamp_h(cfg.theta * std::pow(tol / fgf, 1.0 / (p + 1)), cfg);
}

double driver_compression_tol(const ControllerConfig& cfg) {
  return std::max(1e-10, 0.1 * cfg.Rtol);
}

namespace {

StepResult take_step(const RiccatiProblem& problem, Method method,
                     const LowRankSym& x, double h, const StepConfig& cfg) {
  switch (method) {
    case Method::exprb2: return step_exprb_euler(problem, x, h, cfg);
    case Method::exprb3: return step_exprb3(problem, x, h, cfg);
    case Method::exprb32: return step_exprb32(problem, x, h, cfg);
    case Method::exprb43: return step_exprb43(problem, x, h, cfg);
  }
  throw SolverError("take_step: bad method");
}

void record(Trajectory& traj, double t, double h, int rejects, double err,
            const LowRankSym& x, bool store_states) {
  traj.times.push_back(t);
  traj.steps.push_back(h);
  traj.reject_counts.push_back(rejects);
  traj.error_estimates.push_back(err);
  traj.ranks.push_back(x.rank());
  if (store_states) traj.states.push_back(x);
}

}  // namespace

Trajectory solve_adaptive_partial(const RiccatiProblem& problem, Method method,
                                  const ControllerConfig& cfg_in, double t_end,
                                  const StepConfig& step_cfg_in,
                                  bool store_states, std::string* failure) {
  if (!(t_end > 0.0)) throw SolverError("solve_adaptive: t_end must be > 0");
  if (!method_is_embedded(method)) {
    throw SolverError("solve_adaptive: method " + method_name(method) +
                      " has no embedded error estimate");
  }
  problem.validate();

  ControllerConfig cfg = cfg_in;
  if (cfg.h_max == 0.0) cfg.h_max = t_end;
  if (cfg.h_min == 0.0) cfg.h_min = 1e-12 * t_end;
  cfg.validate();

  StepConfig step_cfg = step_cfg_in;
  step_cfg.tol_rel = driver_compression_tol(cfg);

  const int p = (method == Method::exprb32) ? 2 : 3;

  Trajectory traj;
  LowRankSym x = compress(problem.X0, step_cfg.tol_rel, step_cfg.rank_cap);
  traj.times.push_back(0.0);
  if (store_states) traj.states.push_back(x);

  double t = 0.0;
  double h = initial_step(problem, x, cfg, p);
  if (failure) failure->clear();

  while (t < t_end * (1.0 - 1e-14)) {
    const bool truncated = (h >= t_end - t);
    const double h_try = truncated ? (t_end - t) : h;
    int rejects = 0;
    double h_cur = h_try;
    bool trunc_cur = truncated;

    for (;;) {
      StepResult res = take_step(problem, method, x, h_cur, step_cfg);
      const double err = fro_norm(*res.error_est);
      const double tol = tolerance(x, res.X_next, cfg);
      if (err <= tol) {
        t += h_cur;
        x = std::move(res.X_next);
        record(traj, t, h_cur, rejects, err, x, store_states);
        // A truncated final step must not feed the growth formula.
        if (!trunc_cur) h = next_step_accept(h_cur, err, tol, p, cfg);
        break;
      }
      ++rejects;
      if (rejects > cfg.max_rejects_per_step) {
        traj.final_state = x;
        const std::string msg =
            "solve_adaptive: more than " +
            std::to_string(cfg.max_rejects_per_step) +
            " rejects at t = " + std::to_string(t);
        if (failure) { *failure = msg; return traj; }
        throw StepControlError(msg);
      }
      const double h_new = retry_step_reject(h_cur, err, tol, p, cfg);
      if (h_new <= cfg.h_min * (1.0 + 1e-12) && h_cur <= cfg.h_min * (1.0 + 1e-12)) {
        traj.final_state = x;
        const std::string msg =
            "solve_adaptive: step size fell to h_min at t = " +
            std::to_string(t);
        if (failure) { *failure = msg; return traj; }
        throw StepControlError(msg);
      }
      h_cur = h_new;
      trunc_cur = (h_cur >= t_end - t);
      if (trunc_cur) h_cur = t_end - t;
    }
  }
  traj.times.back() = t_end;  // kill roundoff drift in the last time point
  traj.final_state = x;
  return traj;
}

Trajectory solve_adaptive(const RiccatiProblem& problem, Method method,
                          const ControllerConfig& cfg, double t_end,
                          const StepConfig& step_cfg, bool store_states) {
  return solve_adaptive_partial(problem, method, cfg, t_end, step_cfg,
                                store_states, nullptr);
}

Trajectory solve_fixed(const RiccatiProblem& problem, Method method,
                       int n_steps, double t_end, const StepConfig& step_cfg,
                       bool store_states) {
  if (n_steps < 1) throw SolverError("solve_fixed: n_steps must be >= 1");
  if (!(t_end > 0.0)) throw SolverError("solve_fixed: t_end must be > 0");
  problem.validate();

  const double h = t_end / n_steps;
  Trajectory traj;
  LowRankSym x = compress(problem.X0, step_cfg.tol_rel, step_cfg.rank_cap);
  traj.times.push_back(0.0);
  if (store_states) traj.states.push_back(x);

  for (int n = 0; n < n_steps; ++n) {
    StepResult res = take_step(problem, method, x, h, step_cfg);
    const double err = res.error_est ? fro_norm(*res.error_est) : 0.0;
    x = std::move(res.X_next);
    record(traj, h * (n + 1), h, 0, err, x, store_states);
  }
  traj.times.back() = t_end;
  traj.final_state = x;
  return traj;
}

}  // namespace dre
