#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <vector>

#include "dre/lowrank.hpp"

namespace dre {

/// Arnoldi / quadrature parameters for the exponential and phi actions.
struct KrylovConfig {
  int max_basis = 60;        // Arnoldi dimension cap per substep
  double action_tol = 1e-10; // relative stopping tolerance per column
  int quad_nodes = 12;       // Gauss-Legendre nodes for the phi integrals

  void validate() const;
};

/// Implicit closed-loop matrix  A_n = A - X_n G  with X_n = L D L^T and
/// G = B B^T.  A_n is never formed; mat-vecs cost one sparse apply plus a
/// rank-(r*q) correction through the cached block W = D (L^T B).
class ClosedLoopOperator {
 public:
  ClosedLoopOperator(const Eigen::SparseMatrix<double>& A,
                     const Eigen::MatrixXd& B, const LowRankSym& state);

  // Linear case A_n = A (empty state factors).
  ClosedLoopOperator(const Eigen::SparseMatrix<double>& A,
                     const Eigen::MatrixXd& B);

  Eigen::Index dim() const { return A_.rows(); }

  /// A_n * V without forming A_n.
  Eigen::MatrixXd matvec(const Eigen::MatrixXd& V) const;

  /// One-norm upper bound used to pre-scale Krylov substeps.
  double norm1_bound() const { return norm1_bound_; }

 private:
  Eigen::SparseMatrix<double> A_;
  Eigen::MatrixXd B_;
  Eigen::MatrixXd Ln_;
  Eigen::MatrixXd W_;  // D (L^T B), r x q
  double norm1_bound_ = 0.0;

  void compute_norm_bound();
};

/// Y ~ e^(t A_n) V column by column via Arnoldi with internal
/// time-substepping; the relative error per column is driven below
/// cfg.action_tol using the standard a-posteriori residual term.
/// Exact (Y = V) at t = 0.  Throws KrylovError on non-convergence.
Eigen::MatrixXd expm_action(const ClosedLoopOperator& op, double t,
                            const Eigen::MatrixXd& V, const KrylovConfig& cfg);

/// Low-rank evaluation of phi_k(h Lyap_n)[M] for the Lyapunov operator
/// Lyap_n[X] = A_n X + X A_n^T.
///   k = 0:   e^(h Lyap)[M] = (e^(h A_n) L_M) D_M (e^(h A_n) L_M)^T.
///   k >= 1:  Gauss-Legendre quadrature of the defining integral,
///            sum_i w_i theta_i^(k-1)/(k-1)! (e^((1-theta_i) h A_n) L_M)
///            D_M (...)^T, assembled and compressed at tol_rel.
LowRankSym phi_lyap(const ClosedLoopOperator& op, double h, int k,
                    const LowRankSym& M, const KrylovConfig& cfg,
                    double tol_rel);

/// Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre_01(int n, std::vector<double>& nodes,
                       std::vector<double>& weights);

}  // namespace dre
