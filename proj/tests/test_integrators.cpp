#include <doctest.h>

#include <cmath>
#include <random>

#include "dre/integrators.hpp"
#include "dre/oracle.hpp"

using namespace dre;

namespace {

Eigen::MatrixXd randn(std::mt19937_64& gen, Eigen::Index rows,
                      Eigen::Index cols) {
  std::normal_distribution<double> dist;
  Eigen::MatrixXd M(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) M(i, j) = dist(gen);
  return M;
}

RiccatiProblem random_problem(std::mt19937_64& gen, Eigen::Index n,
                              Eigen::Index p, Eigen::Index q,
                              Eigen::Index r) {
  Eigen::MatrixXd Ad = randn(gen, n, n);
  const double alpha = Ad.eigenvalues().real().maxCoeff();
  Ad -= (alpha + 1.0) * Eigen::MatrixXd::Identity(n, n);
  return {Ad.sparseView(), randn(gen, p, n), randn(gen, n, q),
          LowRankSym(randn(gen, n, r),
                     Eigen::MatrixXd::Identity(r, r) / double(n))};
}

LowRankSym lowrank_from_dense(const Eigen::MatrixXd& X) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(X);
  return LowRankSym(eig.eigenvectors(),
                    eig.eigenvalues().asDiagonal().toDenseMatrix());
}

// local error of one step vs the fine dense oracle, as a function of h
double local_error(const RiccatiProblem& prob,
                   StepResult (*step)(const RiccatiProblem&,
                                      const LowRankSym&, double,
                                      const StepConfig&),
                   double h) {
  StepConfig cfg;
  cfg.tol_rel = 1e-14;
  const StepResult res = step(prob, prob.X0, h, cfg);
  const Eigen::MatrixXd want =
      oracle::integrate_dense(prob, prob.X0.dense(), h, 1e-13);
  return (res.X_next.dense() - want).norm() / want.norm();
}

double fit_slope(const std::vector<double>& hs,
                 const std::vector<double>& errs) {
  const std::size_t m = hs.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double x = std::log(hs[i]);
    const double y = std::log(errs[i]);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace

TEST_CASE("exprb_euler: exact on the linear scalar problem") {
  // a = -1, b = c = 0, x0 = 1:  X' = -2X, one step is exact.
  Eigen::SparseMatrix<double> A(1, 1);
  A.insert(0, 0) = -1.0;
  const RiccatiProblem prob{A, Eigen::MatrixXd::Zero(1, 1),
                            Eigen::MatrixXd::Zero(1, 1),
                            LowRankSym(Eigen::MatrixXd::Identity(1, 1),
                                       Eigen::MatrixXd::Identity(1, 1))};
  const double h = 0.3;
  const StepResult res = step_exprb_euler(prob, prob.X0, h, {});
  CHECK(res.X_next.dense()(0, 0) ==
        doctest::Approx(std::exp(-2.0 * h)).epsilon(1e-11));
  CHECK(res.order_main == 2);
  CHECK(!res.X_embedded.has_value());
}

TEST_CASE("all schemes preserve an equilibrium state") {
  std::mt19937_64 gen(51);
  const auto prob = random_problem(gen, 8, 1, 1, 2);
  const Eigen::MatrixXd Xs = oracle::steady_state(prob, 1e-10);
  const LowRankSym xs = lowrank_from_dense(Xs);
  const double h = 0.05;
  const double scale = Xs.norm();
  for (auto step : {&step_exprb_euler, &step_exprb3, &step_exprb32,
                    &step_exprb43}) {
    const StepResult res = step(prob, xs, h, {});
    CHECK((res.X_next.dense() - Xs).norm() <= 1e-8 * scale);
    if (res.error_est) CHECK(fro_norm(*res.error_est) <= 1e-8 * scale);
  }
}

TEST_CASE("linear problem: stage differences vanish, pairs agree") {
  std::mt19937_64 gen(52);
  auto prob = random_problem(gen, 10, 2, 1, 2);
  prob.B.setZero();  // G = 0
  for (auto step : {&step_exprb32, &step_exprb43}) {
    const StepResult res = step(prob, prob.X0, 0.05, {});
    CHECK((res.X_next.dense() - res.X_embedded->dense()).norm() <=
          1e-11 * res.X_next.dense().norm());
    CHECK(fro_norm(*res.error_est) <= 1e-11 * fro_norm(res.X_next));
  }
  // and the linear exprb43/exprb32 steps equal the Euler step
  const StepResult euler = step_exprb_euler(prob, prob.X0, 0.05, {});
  const StepResult rb32 = step_exprb32(prob, prob.X0, 0.05, {});
  CHECK((euler.X_next.dense() - rb32.X_next.dense()).norm() <=
        1e-11 * euler.X_next.dense().norm());
}

TEST_CASE("exprb3 equals the main solution of exprb32") {
  std::mt19937_64 gen(53);
  const auto prob = random_problem(gen, 12, 1, 1, 2);
  const StepResult a = step_exprb3(prob, prob.X0, 0.02, {});
  const StepResult b = step_exprb32(prob, prob.X0, 0.02, {});
  CHECK((a.X_next.dense() - b.X_next.dense()).norm() <=
        1e-13 * b.X_next.dense().norm());
  CHECK(!a.error_est.has_value());
}

TEST_CASE("pair consistency: X_next - X_embedded equals error_est") {
  std::mt19937_64 gen(54);
  for (int trial = 0; trial < 3; ++trial) {
    const auto prob = random_problem(gen, 20, 2, 1, 3);
    StepConfig cfg;
    cfg.tol_rel = 1e-14;
    for (auto step : {&step_exprb32, &step_exprb43}) {
      const StepResult res = step(prob, prob.X0, 0.05, cfg);
      const Eigen::MatrixXd diff =
          res.X_next.dense() - res.X_embedded->dense();
      const Eigen::MatrixXd est = res.error_est->dense();
      CHECK((diff - est).norm() <=
            1e-12 * std::max(res.X_next.dense().norm(), 1.0));
    }
  }
}

TEST_CASE("local order: exprb_euler h^3, exprb32 h^4, exprb43 h^5") {
  std::mt19937_64 gen(55);
  const auto prob = random_problem(gen, 20, 1, 1, 2);
  const std::vector<double> hs{4e-2, 2e-2, 1e-2, 5e-3};

  auto sweep = [&](StepResult (*step)(const RiccatiProblem&,
                                      const LowRankSym&, double,
                                      const StepConfig&)) {
    std::vector<double> errs;
    for (double h : hs) errs.push_back(local_error(prob, step, h));
    return fit_slope(hs, errs);
  };

  CHECK(sweep(&step_exprb_euler) == doctest::Approx(3.0).epsilon(0.13));
  CHECK(sweep(&step_exprb32) == doctest::Approx(4.0).epsilon(0.12));
  CHECK(sweep(&step_exprb43) == doctest::Approx(5.0).epsilon(0.12));
}

TEST_CASE("step outputs keep the symmetry invariant") {
  std::mt19937_64 gen(56);
  const auto prob = random_problem(gen, 15, 1, 1, 2);
  const StepResult res = step_exprb43(prob, prob.X0, 0.03, {});
  CHECK((res.X_next.core() - res.X_next.core().transpose()).norm() == 0.0);
  CHECK((res.error_est->core() - res.error_est->core().transpose()).norm() ==
        0.0);
}

TEST_CASE("nonpositive h is rejected") {
  std::mt19937_64 gen(57);
  const auto prob = random_problem(gen, 5, 1, 1, 1);
  CHECK_THROWS(step_exprb32(prob, prob.X0, 0.0, {}));
  CHECK_THROWS(step_exprb43(prob, prob.X0, -0.1, {}));
}
