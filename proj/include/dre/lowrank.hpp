#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

namespace dre {

/// Symmetric matrix in factored form X = L * D * L^T with a tall basis L
/// (N x r) and a small symmetric core D (r x r).  Rank zero (r = 0) is a
/// first-class value representing the zero matrix of dimension N.
class LowRankSym {
 public:
  // Zero matrix of dimension n.
  explicit LowRankSym(Eigen::Index n)
      : L_(Eigen::MatrixXd::Zero(n, 0)), D_(Eigen::MatrixXd::Zero(0, 0)) {}

  // The core is symmetrized as (D + D^T)/2 so the represented matrix is
  // symmetric by construction.
  LowRankSym(Eigen::MatrixXd L, const Eigen::MatrixXd& D);

  const Eigen::MatrixXd& basis() const { return L_; }
  const Eigen::MatrixXd& core() const { return D_; }
  Eigen::Index rows() const { return L_.rows(); }
  Eigen::Index rank() const { return L_.cols(); }

  // Dense reconstruction L * D * L^T.  Test/oracle use only.
  Eigen::MatrixXd dense() const { return L_ * D_ * L_.transpose(); }

  LowRankSym scaled(double g) const { return LowRankSym(L_, g * D_); }

 private:
  Eigen::MatrixXd L_;
  Eigen::MatrixXd D_;
};

struct ScaledTerm {
  double coeff;
  const LowRankSym* term;
};

/// Concatenate the factors of sum_k g_k * L_k D_k L_k^T into a single
/// uncompressed LowRankSym: L = [L_1,...,L_m], D = blkdiag(g_1 D_1,...).
LowRankSym assemble(const std::vector<ScaledTerm>& terms);

/// Rank truncation: thin QR of the basis followed by a symmetric
/// eigendecomposition of the projected core; eigenvalues with
/// |lambda| <= tol_rel * max|lambda| are dropped.  The returned basis has
/// orthonormal columns and the core is diagonal.
LowRankSym compress(const LowRankSym& x, double tol_rel,
                    std::optional<Eigen::Index> rank_cap = std::nullopt);

/// Frobenius norm of L D L^T computed from the r x r Gram matrix only:
/// trace((L^T L D)^2)^{1/2}.  Equals ||D||_F when L is orthonormal.
double fro_norm(const LowRankSym& x);

}  // namespace dre
