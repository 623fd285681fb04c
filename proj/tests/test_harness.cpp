#include <doctest.h>

#include <sstream>

#include "dre/error.hpp"
#include "dre/harness.hpp"

using namespace dre;

TEST_CASE("cmd_solve: identical specs give byte-identical CSV") {
  RunSpec spec;
  spec.n0 = 4;
  spec.seed = 9;
  spec.atol = spec.rtol = 1e-4;
  spec.t_end = 0.02;

  std::ostringstream csv1, csv2, sum, diag;
  CHECK(cmd_solve(spec, csv1, sum, diag) == 0);
  CHECK(cmd_solve(spec, csv2, sum, diag) == 0);
  CHECK(csv1.str() == csv2.str());
  CHECK(csv1.str().rfind("t,h,error_estimate,rank,fro_norm,rejects\n", 0) ==
        0);
  CHECK(csv1.str().size() > 50);
}

TEST_CASE("cmd_solve: fixed mode works for non-embedded methods") {
  RunSpec spec;
  spec.n0 = 3;
  spec.method = "exprb2";
  spec.adaptive = false;
  spec.n_steps = 4;
  spec.t_end = 0.01;
  std::ostringstream csv, sum, diag;
  CHECK(cmd_solve(spec, csv, sum, diag) == 0);
  // header plus one row per step
  int lines = 0;
  for (char c : csv.str())
    if (c == '\n') ++lines;
  CHECK(lines == 5);
}

TEST_CASE("cmd_solve: invalid method raises UsageError") {
  RunSpec spec;
  spec.method = "rk4";
  std::ostringstream csv, sum, diag;
  CHECK_THROWS_AS(cmd_solve(spec, csv, sum, diag), UsageError);
}

TEST_CASE("cmd_solve: adaptive mode requires an embedded method") {
  RunSpec spec;
  spec.method = "exprb2";
  spec.adaptive = true;
  std::ostringstream csv, sum, diag;
  CHECK_THROWS_AS(cmd_solve(spec, csv, sum, diag), UsageError);
}

TEST_CASE("cmd_convergence: slopes near nominal orders") {
  RunSpec spec;
  spec.n0 = 4;
  spec.seed = 1;
  spec.method = "exprb2";
  spec.t_end = 0.05;
  spec.step.krylov.quad_nodes = 20;
  std::ostringstream csv, sum, diag;
  CHECK(cmd_convergence(spec, {8, 16, 32}, csv, sum, diag) == 0);
  CHECK(csv.str().rfind("n_steps,rel_error\n", 0) == 0);
  // fitted order printed in the summary
  CHECK(sum.str().find("fitted order") != std::string::npos);
}

TEST_CASE("cmd_convergence: single row has no slope") {
  RunSpec spec;
  spec.n0 = 3;
  spec.method = "exprb2";
  spec.t_end = 0.01;
  std::ostringstream csv, sum, diag;
  CHECK(cmd_convergence(spec, {8}, csv, sum, diag) == 0);
  CHECK(sum.str().find("no slope") != std::string::npos);
}

TEST_CASE("cmd_convergence: oracle cap enforced") {
  RunSpec spec;
  spec.n0 = 9;  // N = 81 > 64
  std::ostringstream csv, sum, diag;
  CHECK_THROWS_AS(cmd_convergence(spec, {8, 16}, csv, sum, diag), UsageError);
}

TEST_CASE("cmd_tolstudy: rows per tolerance, embedded methods only") {
  RunSpec spec;
  spec.n0 = 4;
  spec.method = "exprb32";
  spec.t_end = 0.02;
  std::ostringstream csv, sum, diag;
  CHECK(cmd_tolstudy(spec, {1e-3, 1e-4}, csv, sum, diag) == 0);
  int lines = 0;
  for (char c : csv.str())
    if (c == '\n') ++lines;
  CHECK(lines == 3);

  spec.method = "exprb2";
  std::ostringstream c2, s2, d2;
  CHECK_THROWS_AS(cmd_tolstudy(spec, {1e-3}, c2, s2, d2), UsageError);
}

TEST_CASE("cmd_phitest: small instance passes, caps validated") {
  std::ostringstream rep, diag;
  KrylovConfig kcfg;
  CHECK(cmd_phitest(6, {0, 1, 2}, 2, 3, {0.05}, kcfg, rep, diag) == 0);
  CHECK(rep.str().find("PASS") != std::string::npos);

  CHECK_THROWS_AS(cmd_phitest(40, {1}, 1, 0, {0.1}, kcfg, rep, diag),
                  UsageError);
  CHECK_THROWS_AS(cmd_phitest(5, {5}, 1, 0, {0.1}, kcfg, rep, diag),
                  UsageError);
}

TEST_CASE("cmd_phitest: N = 1 matches the scalar phi to high accuracy") {
  std::ostringstream rep, diag;
  KrylovConfig kcfg;
  CHECK(cmd_phitest(1, {0, 1, 2, 3, 4}, 5, 11, {0.01, 0.1}, kcfg, rep,
                    diag) == 0);
  // the reported max error is far below the 1e-8 gate in the scalar case
  const std::string s = rep.str();
  const auto pos = s.find("max_rel_err=");
  REQUIRE(pos != std::string::npos);
  const double err = std::stod(s.substr(pos + 12));
  CHECK(err <= 1e-12);
}

TEST_CASE("make_problem: exactly one source allowed") {
  RunSpec spec;
  spec.a_path = "x.mtx";  // builtin still set
  CHECK_THROWS_AS(make_problem(spec), UsageError);
}

TEST_CASE("fitted_order recovers a known slope") {
  // err = C n^{-3}
  std::vector<int> ns{8, 16, 32, 64};
  std::vector<double> errs;
  for (int n : ns) errs.push_back(5.0 / (double(n) * n * n));
  CHECK(fitted_order(ns, errs) == doctest::Approx(3.0).epsilon(1e-12));
}
