#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "dre/lowrank.hpp"

namespace dre {

/// Differential Riccati equation  X' = A X + X A^T + Q - X G X  with
/// Q = C^T C and G = B B^T given through their thin factors.
struct RiccatiProblem {
  Eigen::SparseMatrix<double> A;  // N x N
  Eigen::MatrixXd C;              // p x N, Q = C^T C
  Eigen::MatrixXd B;              // N x q, G = B B^T
  LowRankSym X0;

  Eigen::Index dim() const { return A.rows(); }

  // Throws DimensionError if the blocks are mutually inconsistent.
  void validate() const;
};

/// Factored right-hand side F(X) = A X + X A^T + Q - X G X, assembled as
/// Ltilde = [C^T, A L, L] with the block core
///   [ I  0  0
///     0  0  D
///     0  D  -(D L^T B)(D L^T B)^T ]
/// and compressed at tol_rel.
LowRankSym riccati_rhs(const RiccatiProblem& problem, const LowRankSym& x,
                       double tol_rel = 1e-12);

/// Factored stage difference  D_nj = -K G K  with  K = X_nj - X_n:
/// basis [L_n, L_nj], core -(T U^T B)(T U^T B)^T, T = blkdiag(-D_n, D_nj).
/// The core is negative semidefinite by construction.
LowRankSym stage_difference(const LowRankSym& x_n, const LowRankSym& x_nj,
                            const Eigen::MatrixXd& B, double tol_rel = 1e-12);

/// || F(X) G F(X) ||_F evaluated entirely at factor level; the quantity
/// behind the initial-step formula.
double fgf_norm(const RiccatiProblem& problem, const LowRankSym& x,
                double tol_rel = 1e-12);

}  // namespace dre
