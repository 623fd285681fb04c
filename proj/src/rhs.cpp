#include "dre/rhs.hpp"

#include <string>

#include "dre/error.hpp"

namespace dre {

void RiccatiProblem::validate() const {
  const Eigen::Index n = A.rows();
  if (A.cols() != n) {
    throw DimensionError("RiccatiProblem: A must be square");
  }
  if (C.cols() != n) {
    throw DimensionError("RiccatiProblem: C has " + std::to_string(C.cols()) +
                         " columns, expected " + std::to_string(n));
  }
  if (B.rows() != n) {
    throw DimensionError("RiccatiProblem: B has " + std::to_string(B.rows()) +
                         " rows, expected " + std::to_string(n));
  }
  if (X0.rows() != n) {
    throw DimensionError("RiccatiProblem: X0 has " +
                         std::to_string(X0.rows()) + " rows, expected " +
                         std::to_string(n));
  }
}

LowRankSym riccati_rhs(const RiccatiProblem& problem, const LowRankSym& x,
                       double tol_rel) {
  const Eigen::Index n = problem.dim();
  if (x.rows() != n) {
    throw DimensionError("riccati_rhs: state has " + std::to_string(x.rows()) +
                         " rows, expected " + std::to_string(n));
  }
  const Eigen::Index p = problem.C.rows();
  const Eigen::Index r = x.rank();

  Eigen::MatrixXd Lt(n, p + 2 * r);
  Lt.leftCols(p) = problem.C.transpose();
  if (r > 0) {
    Lt.middleCols(p, r) = problem.A * x.basis();
    Lt.rightCols(r) = x.basis();
  }

  Eigen::MatrixXd Dt = Eigen::MatrixXd::Zero(p + 2 * r, p + 2 * r);
  Dt.topLeftCorner(p, p).setIdentity();
  if (r > 0) {
    const Eigen::MatrixXd W = x.core() * (x.basis().transpose() * problem.B);
    Dt.block(p, p + r, r, r) = x.core();
    Dt.block(p + r, p, r, r) = x.core();
    Dt.block(p + r, p + r, r, r) = -W * W.transpose();
  }
  return compress(LowRankSym(std::move(Lt), Dt), tol_rel);
}

LowRankSym stage_difference(const LowRankSym& x_n, const LowRankSym& x_nj,
                            const Eigen::MatrixXd& B, double tol_rel) {
  const Eigen::Index n = x_n.rows();
  if (x_nj.rows() != n || B.rows() != n) {
    throw DimensionError("stage_difference: row dimensions disagree");
  }
  const Eigen::Index rn = x_n.rank();
  const Eigen::Index rj = x_nj.rank();
  if (rn + rj == 0) return LowRankSym(n);

  Eigen::MatrixXd U(n, rn + rj);
  U.leftCols(rn) = x_n.basis();
  U.rightCols(rj) = x_nj.basis();

  // M = T U^T B with T = blkdiag(-D_n, D_nj).
  Eigen::MatrixXd M(rn + rj, B.cols());
  M.topRows(rn) = -x_n.core() * (x_n.basis().transpose() * B);
  M.bottomRows(rj) = x_nj.core() * (x_nj.basis().transpose() * B);

  const Eigen::MatrixXd Gamma = -M * M.transpose();
  return compress(LowRankSym(std::move(U), Gamma), tol_rel);
}

double fgf_norm(const RiccatiProblem& problem, const LowRankSym& x,
                double tol_rel) {
  const LowRankSym f = riccati_rhs(problem, x, tol_rel);
  if (f.rank() == 0) return 0.0;
  // F G F = L_F [ D_F (L_F^T B)(B^T L_F) D_F ] L_F^T
  const Eigen::MatrixXd LtB = f.basis().transpose() * problem.B;
  const Eigen::MatrixXd core = f.core() * LtB * LtB.transpose() * f.core();
  return fro_norm(LowRankSym(f.basis(), core));
}

}  // namespace dre
