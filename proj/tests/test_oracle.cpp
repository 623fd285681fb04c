#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "dre/error.hpp"
#include "dre/oracle.hpp"
#include "dre/problems.hpp"

using namespace dre;

namespace {

// Scalar Riccati instance x' = 2 a x + c^2 - b^2 x^2.
RiccatiProblem scalar_problem(double a, double b, double c, double x0) {
  Eigen::SparseMatrix<double> A(1, 1);
  A.insert(0, 0) = a;
  Eigen::MatrixXd L0(1, 1);
  L0(0, 0) = std::sqrt(std::abs(x0));
  Eigen::MatrixXd D0(1, 1);
  D0(0, 0) = (x0 >= 0) ? 1.0 : -1.0;
  return {A, Eigen::MatrixXd::Constant(1, 1, c),
          Eigen::MatrixXd::Constant(1, 1, b), LowRankSym(L0, D0)};
}

RiccatiProblem random_problem(std::mt19937_64& gen, Eigen::Index n,
                              Eigen::Index p, Eigen::Index q,
                              Eigen::Index r) {
  std::normal_distribution<double> dist;
  Eigen::MatrixXd Ad(n, n), C(p, n), B(n, q), L(n, r);
  for (auto* M : {&Ad, &C, &B, &L}) {
    for (Eigen::Index j = 0; j < M->cols(); ++j)
      for (Eigen::Index i = 0; i < M->rows(); ++i) (*M)(i, j) = dist(gen);
  }
  // Shift past the rightmost eigenvalue so A is strictly stable.
  const double alpha = Ad.eigenvalues().real().maxCoeff();
  Ad -= (alpha + 1.0) * Eigen::MatrixXd::Identity(n, n);
  return {Ad.sparseView(), C, B,
          LowRankSym(L, Eigen::MatrixXd::Identity(r, r) / double(n))};
}

}  // namespace

TEST_CASE("phi_scalar basics and recurrence") {
  CHECK(oracle::phi_scalar(0, 1.0) == doctest::Approx(std::exp(1.0)));
  CHECK(oracle::phi_scalar(1, 0.0) == doctest::Approx(1.0));
  CHECK(oracle::phi_scalar(2, 0.0) == doctest::Approx(0.5));
  // phi_1(z) = (e^z - 1)/z
  CHECK(oracle::phi_scalar(1, -2.0) ==
        doctest::Approx((std::exp(-2.0) - 1.0) / -2.0).epsilon(1e-13));
  // phi_{k+1}(z) = (phi_k(z) - 1/k!) / z at z in {-2, -0.1, 0.5}
  for (double z : {-2.0, -0.1, 0.5}) {
    double fact = 1.0;
    for (int k = 0; k <= 3; ++k) {
      const double lhs = oracle::phi_scalar(k + 1, z);
      const double rhs = (oracle::phi_scalar(k, z) - 1.0 / fact) / z;
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
      fact *= (k + 1);
    }
  }
}

TEST_CASE("dense_rhs: X = 0 gives Q, scalar arithmetic") {
  const auto prob = scalar_problem(-1.0, 2.0, 3.0, 0.5);
  CHECK(oracle::dense_rhs(prob, Eigen::MatrixXd::Zero(1, 1))(0, 0) ==
        doctest::Approx(9.0));
  const Eigen::MatrixXd X = Eigen::MatrixXd::Constant(1, 1, 0.5);
  // 2 a x + c^2 - b^2 x^2 = -1 + 9 - 1 = 7
  CHECK(oracle::dense_rhs(prob, X)(0, 0) == doctest::Approx(7.0));
}

TEST_CASE("dense_solve: linear closed form e^{-2t} X0") {
  Eigen::SparseMatrix<double> A(3, 3);
  for (int i = 0; i < 3; ++i) A.insert(i, i) = -1.0;
  Eigen::MatrixXd L0 = Eigen::MatrixXd::Random(3, 2);
  RiccatiProblem prob{A, Eigen::MatrixXd::Zero(1, 3),
                      Eigen::MatrixXd::Zero(3, 1),
                      LowRankSym(L0, Eigen::MatrixXd::Identity(2, 2))};
  const Eigen::MatrixXd got = oracle::dense_solve(prob, 0.7, 1e-12);
  const Eigen::MatrixXd want = std::exp(-1.4) * prob.X0.dense();
  CHECK((got - want).norm() <= 1e-10 * want.norm());
}

TEST_CASE("dense_solve: scalar Riccati tanh closed form") {
  // x' = -2x + 1 - x^2, x(0) = 0:  x(t) = tanh(sqrt(2) t + c)*sqrt(2) - 1
  // with c = atanh(1/sqrt(2)); equilibrium sqrt(2) - 1.
  const auto prob = scalar_problem(-1.0, 1.0, 1.0, 0.0);
  const double t = 0.8;
  const double c = std::atanh(1.0 / std::sqrt(2.0));
  const double want = std::sqrt(2.0) * std::tanh(std::sqrt(2.0) * t + c) - 1.0;
  CHECK(oracle::dense_solve(prob, t, 1e-12)(0, 0) ==
        doctest::Approx(want).epsilon(1e-10));
  const Eigen::MatrixXd xs = oracle::steady_state(prob, 1e-10);
  CHECK(xs(0, 0) == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-8));
}

TEST_CASE("dense_solve self-consistency at two tolerances") {
  std::mt19937_64 gen(11);
  const auto prob = random_problem(gen, 8, 1, 1, 2);
  const Eigen::MatrixXd a = oracle::dense_solve(prob, 0.3, 1e-8);
  const Eigen::MatrixXd b = oracle::dense_solve(prob, 0.3, 1e-10);
  CHECK((a - b).norm() <= 10 * 1e-8 * b.norm() + 1e-12);
}

TEST_CASE("dense_phi_lyap: k = 0 with A = -I scales by e^{-2h}") {
  const Eigen::MatrixXd A = -Eigen::MatrixXd::Identity(4, 4);
  Eigen::MatrixXd M = Eigen::MatrixXd::Random(4, 4);
  M = (M + M.transpose()).eval();
  const Eigen::MatrixXd got = oracle::dense_phi_lyap(A, 0.3, 0, M);
  CHECK((got - std::exp(-0.6) * M).norm() <= 1e-12 * M.norm());
}

TEST_CASE("dense_phi_lyap: k = 1 at A = 0 is the identity map") {
  const Eigen::MatrixXd A = Eigen::MatrixXd::Zero(3, 3);
  Eigen::MatrixXd M = Eigen::MatrixXd::Random(3, 3);
  M = (M + M.transpose()).eval();
  const Eigen::MatrixXd got = oracle::dense_phi_lyap(A, 0.5, 1, M);
  CHECK((got - M).norm() <= 1e-13 * M.norm());
}

TEST_CASE("dense_phi_lyap: scalar case matches phi_scalar(2 a h)") {
  const Eigen::MatrixXd A = Eigen::MatrixXd::Constant(1, 1, -0.7);
  const Eigen::MatrixXd M = Eigen::MatrixXd::Constant(1, 1, 1.3);
  for (int k = 0; k <= 4; ++k) {
    const double want = oracle::phi_scalar(k, 2.0 * -0.7 * 0.4) * 1.3;
    CHECK(oracle::dense_phi_lyap(A, 0.4, k, M)(0, 0) ==
          doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("dense_phi_lyap satisfies the operator phi recurrence") {
  // h L [phi_{k+1}] = phi_k[M] - M / k!  checked as a residual.
  std::mt19937_64 gen(12);
  std::normal_distribution<double> dist;
  const int n = 5;
  Eigen::MatrixXd A(n, n), M(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      A(i, j) = dist(gen);
      M(i, j) = dist(gen);
    }
  A -= 2.0 * Eigen::MatrixXd::Identity(n, n);
  M = (0.5 * (M + M.transpose())).eval();
  const double h = 0.2;
  double fact = 1.0;
  for (int k = 0; k <= 3; ++k) {
    const Eigen::MatrixXd pk = oracle::dense_phi_lyap(A, h, k, M);
    const Eigen::MatrixXd pk1 = oracle::dense_phi_lyap(A, h, k + 1, M);
    const Eigen::MatrixXd lhs = h * (A * pk1 + pk1 * A.transpose());
    const Eigen::MatrixXd rhs = pk - M / fact;
    CHECK((lhs - rhs).norm() <= 1e-9 * (M.norm() + pk.norm()));
    fact *= (k + 1);
  }
}

TEST_CASE("oracle caps are enforced") {
  std::mt19937_64 gen(13);
  const auto prob = random_problem(gen, 8, 1, 1, 1);
  CHECK_THROWS_AS(oracle::dense_rhs(prob, Eigen::MatrixXd::Zero(7, 7)),
                  DimensionError);
  CHECK_THROWS_AS(
      oracle::dense_phi_lyap(Eigen::MatrixXd::Zero(33, 33), 0.1, 1,
                             Eigen::MatrixXd::Zero(33, 33)),
      SolverError);
  CHECK_THROWS_AS(
      oracle::dense_phi_lyap(Eigen::MatrixXd::Zero(2, 2), 0.1, 5,
                             Eigen::MatrixXd::Zero(2, 2)),
      SolverError);
}

TEST_CASE("steady_state: Lyapunov limit for G = 0") {
  std::mt19937_64 gen(14);
  auto prob = random_problem(gen, 6, 2, 1, 2);
  prob.B.setZero();
  const Eigen::MatrixXd xs = oracle::steady_state(prob, 1e-9);
  const Eigen::MatrixXd res = Eigen::MatrixXd(prob.A) * xs +
                              xs * Eigen::MatrixXd(prob.A).transpose() +
                              prob.C.transpose() * prob.C;
  CHECK(res.norm() <= 1e-8 * xs.norm());
}

TEST_CASE("dense_phi_lyap_all agrees with the per-k evaluation") {
  std::mt19937_64 gen(15);
  std::normal_distribution<double> dist;
  const Eigen::Index n = 5;
  Eigen::MatrixXd An(n, n), M(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) {
      An(i, j) = dist(gen);
      M(i, j) = dist(gen);
    }
  An -= 3.0 * Eigen::MatrixXd::Identity(n, n);
  M = 0.5 * (M + M.transpose()).eval();
  for (double h : {0.02, 0.3}) {
    const auto all = oracle::dense_phi_lyap_all(An, h, 4, M);
    REQUIRE(all.size() == 5);
    for (int k = 0; k <= 4; ++k) {
      const Eigen::MatrixXd want = oracle::dense_phi_lyap(An, h, k, M);
      CHECK((all[std::size_t(k)] - want).norm() <= 1e-12 * want.norm());
    }
  }
  const auto only0 = oracle::dense_phi_lyap_all(An, 0.1, 0, M);
  CHECK(only0.size() == 1);
  CHECK((only0[0] - oracle::dense_phi_lyap(An, 0.1, 0, M)).norm() <=
        1e-12 * only0[0].norm());
}
