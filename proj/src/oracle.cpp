#include "dre/oracle.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <string>

#include "dre/error.hpp"

namespace dre::oracle {

double phi_scalar(int k, double z) {
  if (k < 0) throw SolverError("phi_scalar: k must be nonnegative");
  if (k == 0) return std::exp(z);
  if (std::abs(z) < 0.5) {
    // phi_k(z) = sum_{j>=0} z^j / (j+k)!
    double fact = 1.0;
    for (int i = 2; i <= k; ++i) fact *= i;  // k!
    double term = 1.0 / fact;
    double sum = term;
    for (int j = 1; j <= 40; ++j) {
      term *= z / static_cast<double>(j + k);
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  double phi = std::exp(z);
  double fact = 1.0;
  for (int i = 1; i <= k; ++i) {
    phi = (phi - 1.0 / fact) / z;  // phi_i = (phi_{i-1} - 1/(i-1)!)/z
    fact *= i;
  }
  return phi;
}

Eigen::MatrixXd dense_rhs(const RiccatiProblem& problem,
                          const Eigen::MatrixXd& X) {
  const Eigen::Index n = problem.dim();
  if (n > kDenseCap) {
    throw SolverError("dense_rhs: N = " + std::to_string(n) +
                      " exceeds oracle cap " + std::to_string(kDenseCap));
  }
  if (X.rows() != n || X.cols() != n) {
    throw DimensionError("dense_rhs: state dimension mismatch");
  }
  const Eigen::MatrixXd AX = Eigen::MatrixXd(problem.A) * X;
  const Eigen::MatrixXd XB = X * problem.B;
  return AX + AX.transpose() + problem.C.transpose() * problem.C -
         XB * XB.transpose();
}

namespace {

// Dormand-Prince 5(4) coefficients.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

Eigen::MatrixXd integrate_dense(const RiccatiProblem& problem,
                                const Eigen::MatrixXd& X_start, double t_span,
                                double rtol) {
  const Eigen::Index n = problem.dim();
  if (n > kDenseCap) {
    throw SolverError("integrate_dense: N exceeds oracle cap");
  }
  if (t_span == 0.0) return X_start;

  const double atol = 1e-14;
  Eigen::MatrixXd y = 0.5 * (X_start + X_start.transpose());
  double t = 0.0;
  Eigen::MatrixXd k1 = dense_rhs(problem, y);
  double h = std::min(t_span, 1e-4 / std::max(1.0, k1.norm()));

  while (t < t_span) {
    h = std::min(h, t_span - t);
    if (h < 1e-15 * t_span) {
      throw SolverError(
          "integrate_dense: step size underflow; problem too stiff for the "
          "oracle at this horizon, use a smaller t_end or smaller N");
    }
    const Eigen::MatrixXd k2 = dense_rhs(problem, y + h * (a21 * k1));
    const Eigen::MatrixXd k3 = dense_rhs(problem, y + h * (a31 * k1 + a32 * k2));
    const Eigen::MatrixXd k4 =
        dense_rhs(problem, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Eigen::MatrixXd k5 = dense_rhs(
        problem, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Eigen::MatrixXd k6 = dense_rhs(
        problem,
        y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const Eigen::MatrixXd ynew =
        y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Eigen::MatrixXd k7 = dense_rhs(problem, ynew);
    const Eigen::MatrixXd err_mat =
        h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    const double sc =
        atol + rtol * std::max(y.cwiseAbs().maxCoeff(),
                               ynew.cwiseAbs().maxCoeff());
    const double err = err_mat.cwiseAbs().maxCoeff() / sc;
    if (!std::isfinite(err)) {
      throw SolverError(
          "integrate_dense: solution blew up (non-finite state); the "
          "instance is unstable over this horizon");
    }

    if (err <= 1.0) {
      t += h;
      y = 0.5 * (ynew + ynew.transpose());
      k1 = k7;  // FSAL
      h *= std::min(5.0, std::max(0.2, 0.9 * std::pow(1.0 / std::max(err, 1e-16), 0.2)));
    } else {
      h *= std::max(0.2, 0.9 * std::pow(1.0 / err, 0.2));
    }
  }
  return y;
}

Eigen::MatrixXd dense_solve(const RiccatiProblem& problem, double t_end,
                            double rtol) {
  return integrate_dense(problem, problem.X0.dense(), t_end, rtol);
}

namespace {

void check_phi_lyap_args(const Eigen::MatrixXd& An, int k,
                         const Eigen::MatrixXd& M) {
  const Eigen::Index n = An.rows();
  if (n > kKroneckerCap) {
    throw SolverError("dense_phi_lyap: N = " + std::to_string(n) +
                      " exceeds Kronecker cap " +
                      std::to_string(kKroneckerCap));
  }
  if (k < 0 || k > 4) {
    throw SolverError("dense_phi_lyap: k must lie in [0, 4]");
  }
  if (An.cols() != n || M.rows() != n || M.cols() != n) {
    throw DimensionError("dense_phi_lyap: dimension mismatch");
  }
}

// Lyap = I (x) An + An (x) I acting on column-major vec(M).
Eigen::MatrixXd kronecker_lyap(const Eigen::MatrixXd& An) {
  const Eigen::Index n = An.rows();
  Eigen::MatrixXd Lyap = Eigen::MatrixXd::Zero(n * n, n * n);
  for (Eigen::Index j = 0; j < n; ++j) {
    Lyap.block(j * n, j * n, n, n) += An;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index l = 0; l < n; ++l) {
        Lyap(j * n + i, l * n + i) += An(j, l);
      }
    }
  }
  return Lyap;
}

Eigen::MatrixXd unvec_sym(const Eigen::VectorXd& w, Eigen::Index n) {
  Eigen::MatrixXd out =
      Eigen::Map<const Eigen::MatrixXd>(w.data(), n, n);
  return 0.5 * (out + out.transpose());
}

}  // namespace

Eigen::MatrixXd dense_phi_lyap(const Eigen::MatrixXd& An, double h, int k,
                               const Eigen::MatrixXd& M) {
  check_phi_lyap_args(An, k, M);
  const Eigen::Index n = An.rows();
  const Eigen::Index n2 = n * n;
  const Eigen::MatrixXd Lyap = kronecker_lyap(An);
  const Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(M.data(), n2);

  Eigen::VectorXd w(n2);
  if (k == 0) {
    w = (h * Lyap).exp() * v;
  } else {
    // exp of the augmented matrix [hL, v, 0; 0, 0, I_{k-1}; 0, 0, 0]:
    // its top-right column is phi_k(hL) v.
    Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n2 + k, n2 + k);
    aug.topLeftCorner(n2, n2) = h * Lyap;
    aug.block(0, n2, n2, 1) = v;
    for (int i = 0; i < k - 1; ++i) aug(n2 + i, n2 + i + 1) = 1.0;
    const Eigen::MatrixXd E = aug.exp();
    w = E.block(0, n2 + k - 1, n2, 1);
  }
  return unvec_sym(w, n);
}

std::vector<Eigen::MatrixXd> dense_phi_lyap_all(const Eigen::MatrixXd& An,
                                                double h, int kmax,
                                                const Eigen::MatrixXd& M) {
  check_phi_lyap_args(An, kmax, M);
  const Eigen::Index n = An.rows();
  const Eigen::Index n2 = n * n;
  const Eigen::MatrixXd Lyap = kronecker_lyap(An);
  const Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(M.data(), n2);

  std::vector<Eigen::MatrixXd> out;
  out.reserve(static_cast<std::size_t>(kmax) + 1);
  if (kmax == 0) {
    out.push_back(unvec_sym((h * Lyap).exp() * v, n));
    return out;
  }
  // One exponential of [hL, v, 0; 0, 0, I_{kmax-1}; 0, 0, 0]: the strictly
  // block-triangular tail means column n2 + j - 1 of the result carries
  // phi_j(hL) v for every j = 1..kmax, and the top-left block is e^{hL}.
  Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n2 + kmax, n2 + kmax);
  aug.topLeftCorner(n2, n2) = h * Lyap;
  aug.block(0, n2, n2, 1) = v;
  for (int i = 0; i < kmax - 1; ++i) aug(n2 + i, n2 + i + 1) = 1.0;
  const Eigen::MatrixXd E = aug.exp();
  out.push_back(unvec_sym(E.topLeftCorner(n2, n2) * v, n));
  for (int j = 1; j <= kmax; ++j) {
    out.push_back(unvec_sym(E.block(0, n2 + j - 1, n2, 1), n));
  }
  return out;
}

Eigen::MatrixXd steady_state(const RiccatiProblem& problem, double tol) {
  Eigen::MatrixXd X = problem.X0.dense();
  double horizon = 1.0;
  const double rtol = std::min(1e-12, 0.01 * tol);
  for (int iter = 0; iter < 24; ++iter) {
    X = integrate_dense(problem, X, horizon, rtol);
    const double res = dense_rhs(problem, X).norm();
    const double scale = std::max(X.norm(), 1e-30);
    if (res <= tol * scale) return X;
    horizon *= 2.0;
  }
  throw SolverError("steady_state: no convergence within the horizon budget");
}

}  // namespace dre::oracle
