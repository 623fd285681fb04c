#include "dre/lyapunov.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <string>

#include "dre/error.hpp"

namespace dre {

void KrylovConfig::validate() const {
  if (max_basis < 2) throw SolverError("KrylovConfig: max_basis must be >= 2");
  if (!(action_tol > 0.0)) {
    throw SolverError("KrylovConfig: action_tol must be positive");
  }
  if (quad_nodes < 2) {
    throw SolverError("KrylovConfig: quad_nodes must be >= 2");
  }
}

ClosedLoopOperator::ClosedLoopOperator(const Eigen::SparseMatrix<double>& A,
                                       const Eigen::MatrixXd& B,
                                       const LowRankSym& state)
    : A_(A), B_(B), Ln_(state.basis()) {
  if (A_.rows() != A_.cols()) {
    throw DimensionError("ClosedLoopOperator: A must be square");
  }
  if (B_.rows() != A_.rows() || state.rows() != A_.rows()) {
    throw DimensionError("ClosedLoopOperator: B or state rows != dim(A)");
  }
  W_ = state.core() * (Ln_.transpose() * B_);
  compute_norm_bound();
}

ClosedLoopOperator::ClosedLoopOperator(const Eigen::SparseMatrix<double>& A,
                                       const Eigen::MatrixXd& B)
    : ClosedLoopOperator(A, B, LowRankSym(A.rows())) {}

void ClosedLoopOperator::compute_norm_bound() {
  double a1 = 0.0;
  for (Eigen::Index j = 0; j < A_.outerSize(); ++j) {
    double col = 0.0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(A_, j); it; ++it) {
      col += std::abs(it.value());
    }
    a1 = std::max(a1, col);
  }
  double corr = 0.0;
  if (Ln_.cols() > 0) {
    const double l1 = Ln_.cwiseAbs().colwise().sum().maxCoeff();
    const double w1 = W_.cwiseAbs().colwise().sum().maxCoeff();
    const double b1 = B_.cwiseAbs().rowwise().sum().maxCoeff();
    corr = l1 * w1 * b1;
  }
  norm1_bound_ = a1 + corr;
}

Eigen::MatrixXd ClosedLoopOperator::matvec(const Eigen::MatrixXd& V) const {
  if (V.rows() != A_.rows()) {
    throw DimensionError("ClosedLoopOperator::matvec: V has " +
                         std::to_string(V.rows()) + " rows, expected " +
                         std::to_string(A_.rows()));
  }
  Eigen::MatrixXd out = A_ * V;
  if (Ln_.cols() > 0) {
    out.noalias() -= Ln_ * (W_ * (B_.transpose() * V));
  }
  return out;
}

namespace {

struct ArnoldiFactorization {
  Eigen::MatrixXd V;  // N x m orthonormal basis
  Eigen::MatrixXd H;  // m x m upper Hessenberg
  double h_next = 0.0;
  int m = 0;
};

ArnoldiFactorization arnoldi(const ClosedLoopOperator& op,
                             const Eigen::VectorXd& v0, int max_basis) {
  const Eigen::Index n = op.dim();
  const int mmax = static_cast<int>(std::min<Eigen::Index>(max_basis, n));
  ArnoldiFactorization f;
  f.V.resize(n, mmax + 1);
  f.H = Eigen::MatrixXd::Zero(mmax + 1, mmax);
  f.V.col(0) = v0;
  const double breakdown_tol = 1e-14;

  int j = 0;
  for (; j < mmax; ++j) {
    Eigen::VectorXd w = op.matvec(f.V.col(j));
    // Modified Gram-Schmidt with one reorthogonalization pass.
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i <= j; ++i) {
        const double c = f.V.col(i).dot(w);
        f.H(i, j) += c;
        w -= c * f.V.col(i);
      }
    }
    const double hn = w.norm();
    f.H(j + 1, j) = hn;
    if (hn < breakdown_tol * std::max(1.0, f.H.col(j).cwiseAbs().maxCoeff())) {
      f.m = j + 1;
      f.h_next = 0.0;  // invariant subspace, approximation is exact
      return f;
    }
    f.V.col(j + 1) = w / hn;
  }
  f.m = mmax;
  f.h_next = f.H(mmax, mmax - 1);
  return f;
}

// e^(t A) y for a single column with substepping: within one Arnoldi
// factorization the substep tau is halved until the a-posteriori term
// beta * h_{m+1,m} * tau * |e_m^T phi_1(tau H) e_1| meets the tolerance.
Eigen::VectorXd expm_column(const ClosedLoopOperator& op, double t,
                            Eigen::VectorXd y, const KrylovConfig& cfg) {
  double remaining = t;
  // Initial substep guess from the one-norm bound; refined by the estimate.
  double tau = remaining;
  const double a1 = op.norm1_bound();
  if (a1 > 0.0) tau = std::min(tau, 10.0 * cfg.max_basis / a1);

  while (remaining > 0.0) {
    const double beta = y.norm();
    if (beta == 0.0) return y;
    const ArnoldiFactorization f = arnoldi(op, y / beta, cfg.max_basis);
    const int m = f.m;

    tau = std::min(tau, remaining);
    for (;;) {
      // Augmented small exponential gives e^(tau H) e1 and phi_1(tau H) e1
      // in one call.
      Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(m + 1, m + 1);
      aug.topLeftCorner(m, m) = tau * f.H.topLeftCorner(m, m);
      aug(0, m) = 1.0;
      const Eigen::MatrixXd E = aug.exp();
      const double err = beta * f.h_next * tau * std::abs(E(m - 1, m));
      if (err <= cfg.action_tol * beta || f.h_next == 0.0) {
        y = beta * (f.V.leftCols(m) * E.topLeftCorner(m, m).col(0));
        remaining -= tau;
        if (err < 0.01 * cfg.action_tol * beta) tau *= 2.0;
        break;
      }
      tau *= 0.5;
      if (tau < 1e-12 * t) {
        throw KrylovError(
            "expm_action: no convergence at max_basis even after "
            "time-substepping (residual estimate " +
                std::to_string(err / beta) + ")",
            err / beta);
      }
    }
  }
  return y;
}

}  // namespace

Eigen::MatrixXd expm_action(const ClosedLoopOperator& op, double t,
                            const Eigen::MatrixXd& V,
                            const KrylovConfig& cfg) {
  cfg.validate();
  if (V.rows() != op.dim()) {
    throw DimensionError("expm_action: block row dimension mismatch");
  }
  if (V.cols() == 0) {
    throw DimensionError("expm_action: block must be non-empty");
  }
  if (!std::isfinite(t) || t < 0.0) {
    throw SolverError("expm_action: t must be finite and nonnegative");
  }
  if (t == 0.0) return V;
  Eigen::MatrixXd out(V.rows(), V.cols());
  for (Eigen::Index j = 0; j < V.cols(); ++j) {
    out.col(j) = expm_column(op, t, V.col(j), cfg);
  }
  return out;
}

LowRankSym phi_lyap(const ClosedLoopOperator& op, double h, int k,
                    const LowRankSym& M, const KrylovConfig& cfg,
                    double tol_rel) {
  cfg.validate();
  if (M.rows() != op.dim()) {
    throw DimensionError("phi_lyap: M row dimension mismatch");
  }
  if (k < 0 || k > 4) {
    throw SolverError("phi_lyap: k must lie in [0, 4]");
  }
  if (M.rank() == 0) return LowRankSym(op.dim());
  if (h == 0.0) {
    double fact = 1.0;
    for (int i = 2; i <= k; ++i) fact *= i;
    return M.scaled(1.0 / fact);  // phi_k(0) = 1/k!
  }

  if (k == 0) {
    return LowRankSym(expm_action(op, h, M.basis(), cfg), M.core());
  }

  std::vector<double> theta, w;
  gauss_legendre_01(cfg.quad_nodes, theta, w);
  double fact = 1.0;
  for (int i = 2; i <= k - 1; ++i) fact *= i;  // (k-1)!

  std::vector<LowRankSym> node_terms;
  node_terms.reserve(theta.size());
  std::vector<ScaledTerm> terms;
  terms.reserve(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    Eigen::MatrixXd Li = expm_action(op, (1.0 - theta[i]) * h, M.basis(), cfg);
    node_terms.emplace_back(std::move(Li), M.core());
  }
  for (std::size_t i = 0; i < theta.size(); ++i) {
    terms.push_back({w[i] * std::pow(theta[i], k - 1) / fact, &node_terms[i]});
  }
  return compress(assemble(terms), tol_rel);
}

void gauss_legendre_01(int n, std::vector<double>& nodes,
                       std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  // Newton iteration on the Legendre polynomial P_n over [-1, 1].
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = 0.5 * (1.0 - x);  // descending x maps to ascending theta
    weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
}

}  // namespace dre
