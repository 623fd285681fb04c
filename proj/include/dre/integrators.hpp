#pragma once

#include <optional>

#include "dre/lowrank.hpp"
#include "dre/lyapunov.hpp"
#include "dre/rhs.hpp"

namespace dre {

/// Numerical parameters shared by one step: Krylov/quadrature settings
/// and the compression tolerance applied to every intermediate factor.
struct StepConfig {
  KrylovConfig krylov;
  double tol_rel = 1e-12;
  std::optional<Eigen::Index> rank_cap;
};

/// Output of a single one-step map.  For embedded pairs,
/// dense(X_next) - dense(X_embedded) equals dense(error_est) up to
/// assembly roundoff.
struct StepResult {
  LowRankSym X_next;                    // higher-order solution
  std::optional<LowRankSym> X_embedded; // lower-order companion
  std::optional<LowRankSym> error_est;  // X_next - X_embedded, factored
  int order_main = 0;
  int order_embedded = 0;
};

/// Exponential Rosenbrock-Euler: X_{n+1} = X_n + h phi_1(h L_n)[F(X_n)].
/// Second order, no embedded solution.
StepResult step_exprb_euler(const RiccatiProblem& problem,
                            const LowRankSym& x_n, double h,
                            const StepConfig& cfg);

/// Third-order scheme with second-order embedding: the Rosenbrock-Euler
/// stage is corrected by 2h phi_3(h L_n)[D_n2] and doubles as the
/// embedded solution.
StepResult step_exprb32(const RiccatiProblem& problem, const LowRankSym& x_n,
                        double h, const StepConfig& cfg);

/// The third-order solution of exprb32 without the embedded output.
StepResult step_exprb3(const RiccatiProblem& problem, const LowRankSym& x_n,
                       double h, const StepConfig& cfg);

/// Fourth-order scheme with third-order embedding; stages at c2 = 1/2 and
/// c3 = 1, weights 16 phi_3 - 48 phi_4 and -2 phi_3 + 12 phi_4.
StepResult step_exprb43(const RiccatiProblem& problem, const LowRankSym& x_n,
                        double h, const StepConfig& cfg);

}  // namespace dre
