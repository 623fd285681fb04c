#include "dre/integrators.hpp"

#include "dre/error.hpp"

namespace dre {

namespace {

LowRankSym combine(const std::vector<ScaledTerm>& terms,
                   const StepConfig& cfg) {
  return compress(assemble(terms), cfg.tol_rel, cfg.rank_cap);
}

}  // namespace

StepResult step_exprb_euler(const RiccatiProblem& problem,
                            const LowRankSym& x_n, double h,
                            const StepConfig& cfg) {
  if (!(h > 0.0)) throw SolverError("step: h must be positive");
  const ClosedLoopOperator op(problem.A, problem.B, x_n);
  const LowRankSym f = riccati_rhs(problem, x_n, cfg.tol_rel);
  const LowRankSym s1 = phi_lyap(op, h, 1, f, cfg.krylov, cfg.tol_rel);
  StepResult res{combine({{1.0, &x_n}, {h, &s1}}, cfg),
                 std::nullopt, std::nullopt, 2, 0};
  return res;
}

StepResult step_exprb32(const RiccatiProblem& problem, const LowRankSym& x_n,
                        double h, const StepConfig& cfg) {
  if (!(h > 0.0)) throw SolverError("step: h must be positive");
  const ClosedLoopOperator op(problem.A, problem.B, x_n);
  const LowRankSym f = riccati_rhs(problem, x_n, cfg.tol_rel);
  const LowRankSym s1 = phi_lyap(op, h, 1, f, cfg.krylov, cfg.tol_rel);
  const LowRankSym x_n2 = combine({{1.0, &x_n}, {h, &s1}}, cfg);

  const LowRankSym d_n2 = stage_difference(x_n, x_n2, problem.B, cfg.tol_rel);
  const LowRankSym t3 = phi_lyap(op, h, 3, d_n2, cfg.krylov, cfg.tol_rel);

  StepResult res{combine({{1.0, &x_n2}, {2.0 * h, &t3}}, cfg),
                 x_n2, t3.scaled(2.0 * h), 3, 2};
  return res;
}

StepResult step_exprb3(const RiccatiProblem& problem, const LowRankSym& x_n,
                       double h, const StepConfig& cfg) {
  StepResult res = step_exprb32(problem, x_n, h, cfg);
  res.X_embedded.reset();
  res.error_est.reset();
  res.order_embedded = 0;
  return res;
}

StepResult step_exprb43(const RiccatiProblem& problem, const LowRankSym& x_n,
                        double h, const StepConfig& cfg) {
  if (!(h > 0.0)) throw SolverError("step: h must be positive");
  const ClosedLoopOperator op(problem.A, problem.B, x_n);
  const LowRankSym f = riccati_rhs(problem, x_n, cfg.tol_rel);

  const LowRankSym s_half =
      phi_lyap(op, 0.5 * h, 1, f, cfg.krylov, cfg.tol_rel);
  const LowRankSym x_n2 = combine({{1.0, &x_n}, {0.5 * h, &s_half}}, cfg);

  const LowRankSym s_full = phi_lyap(op, h, 1, f, cfg.krylov, cfg.tol_rel);
  const LowRankSym x_n3 = combine({{1.0, &x_n}, {h, &s_full}}, cfg);

  const LowRankSym d_n2 = stage_difference(x_n, x_n2, problem.B, cfg.tol_rel);
  const LowRankSym d_n3 = stage_difference(x_n, x_n3, problem.B, cfg.tol_rel);

  const LowRankSym t3a = phi_lyap(op, h, 3, d_n2, cfg.krylov, cfg.tol_rel);
  const LowRankSym t3b = phi_lyap(op, h, 3, d_n3, cfg.krylov, cfg.tol_rel);
  const LowRankSym x_emb =
      combine({{1.0, &x_n3}, {16.0 * h, &t3a}, {-2.0 * h, &t3b}}, cfg);

  // One phi_4 action on the pre-assembled combination -48 D_n2 + 12 D_n3.
  const LowRankSym d_comb =
      combine({{-48.0, &d_n2}, {12.0, &d_n3}}, cfg);
  const LowRankSym t4 = phi_lyap(op, h, 4, d_comb, cfg.krylov, cfg.tol_rel);

  StepResult res{combine({{1.0, &x_emb}, {h, &t4}}, cfg),
                 x_emb, t4.scaled(h), 4, 3};
  return res;
}

}  // namespace dre
