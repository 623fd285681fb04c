#include "dre/lowrank.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dre/error.hpp"

namespace dre {

LowRankSym::LowRankSym(Eigen::MatrixXd L, const Eigen::MatrixXd& D)
    : L_(std::move(L)) {
  if (D.rows() != D.cols()) {
    throw DimensionError("LowRankSym: core must be square, got " +
                         std::to_string(D.rows()) + "x" +
                         std::to_string(D.cols()));
  }
  if (L_.cols() != D.rows()) {
    throw DimensionError("LowRankSym: basis has " + std::to_string(L_.cols()) +
                         " columns but core is " + std::to_string(D.rows()) +
                         "x" + std::to_string(D.cols()));
  }
  D_ = 0.5 * (D + D.transpose());
}

LowRankSym assemble(const std::vector<ScaledTerm>& terms) {
  if (terms.empty()) {
    throw DimensionError("assemble: empty term list");
  }
  const Eigen::Index n = terms.front().term->rows();
  Eigen::Index total_rank = 0;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    if (terms[k].term->rows() != n) {
      throw DimensionError("assemble: term " + std::to_string(k) + " has " +
                           std::to_string(terms[k].term->rows()) +
                           " rows, expected " + std::to_string(n));
    }
    total_rank += terms[k].term->rank();
  }
  Eigen::MatrixXd L(n, total_rank);
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(total_rank, total_rank);
  Eigen::Index off = 0;
  for (const auto& [g, x] : terms) {
    const Eigen::Index r = x->rank();
    L.middleCols(off, r) = x->basis();
    D.block(off, off, r, r) = g * x->core();
    off += r;
  }
  return LowRankSym(std::move(L), D);
}

LowRankSym compress(const LowRankSym& x, double tol_rel,
                    std::optional<Eigen::Index> rank_cap) {
  const Eigen::Index n = x.rows();
  const Eigen::Index r = x.rank();
  if (r == 0) return LowRankSym(n);

  // Thin QR of the (possibly rank-deficient) basis.
  const Eigen::Index k = std::min(n, r);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(x.basis());
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, k);
  Eigen::MatrixXd R = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();

  Eigen::MatrixXd S = R * x.core() * R.transpose();
  S = 0.5 * (S + S.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(S);
  if (eig.info() != Eigen::Success) {
    throw SolverError("compress: symmetric eigendecomposition failed");
  }
  const Eigen::VectorXd& lam = eig.eigenvalues();
  const double lam_max = lam.cwiseAbs().maxCoeff();
  if (lam_max == 0.0) return LowRankSym(n);

  // Roundoff floor relative to the pre-cancellation scale of the factors,
  // so exactly cancelling terms truncate to rank 0.  The entrywise bound
  // |R| |D| |R|^T tracks the magnitudes actually summed when forming S.
  const double scale =
      (R.cwiseAbs() * x.core().cwiseAbs() * R.cwiseAbs().transpose()).norm();
  const double cut = std::max(tol_rel * lam_max, 1e-14 * scale);

  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (std::abs(lam(i)) > cut) keep.push_back(i);
  }
  // Largest magnitudes first so a rank cap keeps the dominant directions.
  std::sort(keep.begin(), keep.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(lam(a)) > std::abs(lam(b));
  });
  if (rank_cap && static_cast<Eigen::Index>(keep.size()) > *rank_cap) {
    keep.resize(static_cast<std::size_t>(*rank_cap));
  }
  if (keep.empty()) return LowRankSym(n);

  Eigen::MatrixXd V(k, static_cast<Eigen::Index>(keep.size()));
  Eigen::VectorXd d(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    V.col(static_cast<Eigen::Index>(j)) = eig.eigenvectors().col(keep[j]);
    d(static_cast<Eigen::Index>(j)) = lam(keep[j]);
  }
  return LowRankSym(Q * V, d.asDiagonal());
}

double fro_norm(const LowRankSym& x) {
  if (x.rank() == 0) return 0.0;
  const Eigen::MatrixXd M = (x.basis().transpose() * x.basis()) * x.core();
  const double t = (M * M).trace();
  return std::sqrt(std::max(t, 0.0));
}

}  // namespace dre
