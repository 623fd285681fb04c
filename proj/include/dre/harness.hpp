#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dre/adaptivity.hpp"
#include "dre/problems.hpp"

namespace dre {

/// One experiment: a problem source, a method, and either a fixed step
/// count or adaptive tolerances.  Used by the CLI and by tests; running
/// the same spec twice yields byte-identical CSV output.
struct RunSpec {
  // Problem source: builtin generator or file paths (exactly one).
  std::string builtin = "advdiff";  // empty when files are given
  int n0 = 8;
  int initial_rank = 1;
  std::uint64_t seed = 0;
  std::string a_path, b_path, c_path, e_path;

  std::string method = "exprb32";
  bool adaptive = true;
  int n_steps = 64;        // fixed mode
  double atol = 1e-5;      // adaptive mode
  double rtol = 1e-5;
  double t_end = 0.1;

  ControllerConfig controller;  // sigma/delta/theta overrides
  StepConfig step;              // Krylov and compression settings
};

/// Build the problem described by the spec (throws UsageError on an
/// inconsistent source).
RiccatiProblem make_problem(const RunSpec& spec);

/// Integrate per spec and stream the trajectory as CSV
/// (t,h,error_estimate,rank,fro_norm,rejects) plus a human summary.
/// Returns 0 on success, 1 on solver failure (partial CSV is still
/// written).
int cmd_solve(const RunSpec& spec, std::ostream& csv, std::ostream& summary,
              std::ostream& diag);

/// Fixed-step convergence sweep against the dense oracle; one CSV row
/// (n_steps,rel_error) per entry plus the fitted log-log slope.
int cmd_convergence(const RunSpec& spec, const std::vector<int>& step_counts,
                    std::ostream& csv, std::ostream& summary,
                    std::ostream& diag);

/// Adaptive tolerance sweep against the dense oracle; one CSV row
/// (tol,steps,rejects,rel_error) per tolerance.
int cmd_tolstudy(const RunSpec& spec, const std::vector<double>& tols,
                 std::ostream& csv, std::ostream& summary, std::ostream& diag);

/// Kernel self-test: phi_lyap against the Kronecker oracle on seeded
/// random closed-loop operators.  Fails (returns 1) above 1e-8 relative.
int cmd_phitest(int N, const std::vector<int>& ks, int trials,
                std::uint64_t seed, const std::vector<double>& hs,
                const KrylovConfig& kcfg, std::ostream& report,
                std::ostream& diag);

/// Least-squares slope of log(err) vs log(n), sign-flipped so a method of
/// order q reports roughly +q.
double fitted_order(const std::vector<int>& ns,
                    const std::vector<double>& errs);

/// Deterministic shortest round-trip formatting used for all CSV output.
std::string format_double(double v);

}  // namespace dre
