// Command-line harness for the adaptive low-rank DRE solver.
//
// Subcommands: solve, convergence, tolstudy, phitest.
// Exit codes: 0 success, 1 solver failure, 2 usage/validation error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "dre/error.hpp"
#include "dre/harness.hpp"

namespace {

struct CommonOpts {
  dre::RunSpec spec;
  std::string out_path;
};

void add_problem_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--problem", o.spec.builtin,
                  "builtin problem generator (advdiff)");
  cmd->add_option("--n0", o.spec.n0, "grid points per dimension (N = n0^2)");
  cmd->add_option("--rank0", o.spec.initial_rank, "initial factor rank");
  cmd->add_option("--seed", o.spec.seed, "seed for the initial factor");
  cmd->add_option("--a", o.spec.a_path, "sparse A (Matrix Market)");
  cmd->add_option("--b", o.spec.b_path, "B factor (headerless CSV)");
  cmd->add_option("--c", o.spec.c_path, "C factor (headerless CSV)");
  cmd->add_option("--e", o.spec.e_path, "diagonal of E (headerless CSV)");
  cmd->add_option("--t-end", o.spec.t_end, "integration horizon");
  cmd->add_option("--out", o.out_path, "output CSV path (default stdout)");
  cmd->add_option("--quad-nodes", o.spec.step.krylov.quad_nodes,
                  "Gauss-Legendre nodes for phi integrals");
  cmd->add_option("--max-basis", o.spec.step.krylov.max_basis,
                  "Arnoldi basis cap");
  cmd->add_option("--action-tol", o.spec.step.krylov.action_tol,
                  "Krylov exponential action tolerance");
  cmd->add_option("--compress-tol", o.spec.step.tol_rel,
                  "factor compression tolerance");
}

void add_controller_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--sigma1", o.spec.controller.sigma1, "accept safety factor");
  cmd->add_option("--sigma2", o.spec.controller.sigma2, "reject safety factor");
  cmd->add_option("--delta-max", o.spec.controller.delta_max, "max growth");
  cmd->add_option("--delta-min", o.spec.controller.delta_min, "max shrink");
  cmd->add_option("--theta", o.spec.controller.theta,
                  "initial-step safety factor");
  cmd->add_option("--h-min", o.spec.controller.h_min, "minimum step size");
  cmd->add_option("--h-max", o.spec.controller.h_max, "maximum step size");
  cmd->add_option("--max-rejects", o.spec.controller.max_rejects_per_step,
                  "reject budget per step");
}

int with_output(const std::string& path,
                const std::function<int(std::ostream&)>& fn) {
  if (path.empty()) return fn(std::cout);
  std::ofstream out(path);
  if (!out) {
    std::cerr << "error: cannot open output file " << path << "\n";
    return 1;
  }
  return fn(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive low-rank exponential Rosenbrock solver for "
               "differential Riccati equations"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key-value config file; flags override it");

  CommonOpts solve_o, conv_o, tol_o;
  bool adaptive_tol_given = false;

  // solve
  auto* solve = app.add_subcommand("solve", "integrate one problem");
  add_problem_flags(solve, solve_o);
  add_controller_flags(solve, solve_o);
  solve->add_option("--method", solve_o.spec.method,
                    "exprb2 | exprb3 | exprb32 | exprb43");
  int solve_steps = 0;
  auto* tol_opt = solve->add_option_function<double>(
      "--tol",
      [&](double v) {
        solve_o.spec.atol = solve_o.spec.rtol = v;
        adaptive_tol_given = true;
      },
      "adaptive mode: Atol = Rtol = tol");
  solve->add_option("--atol", solve_o.spec.atol, "absolute tolerance");
  solve->add_option("--rtol", solve_o.spec.rtol, "relative tolerance");
  auto* steps_opt = solve->add_option("--steps", solve_steps,
                                      "fixed mode: number of uniform steps");
  steps_opt->excludes(tol_opt);

  // convergence
  auto* conv = app.add_subcommand(
      "convergence", "fixed-step error sweep against the dense oracle");
  add_problem_flags(conv, conv_o);
  conv->add_option("--method", conv_o.spec.method, "integrator");
  std::vector<int> step_list{16, 32, 64, 128};
  conv->add_option("--steps", step_list, "list of step counts");

  // tolstudy
  auto* tstudy = app.add_subcommand(
      "tolstudy", "adaptive tolerance sweep against the dense oracle");
  add_problem_flags(tstudy, tol_o);
  add_controller_flags(tstudy, tol_o);
  tstudy->add_option("--method", tol_o.spec.method, "embedded integrator");
  std::vector<double> tol_list{1e-3, 1e-4, 1e-5};
  tstudy->add_option("--tols", tol_list, "list of tolerances");

  // phitest
  auto* ptest = app.add_subcommand(
      "phitest", "phi kernel self-test against the Kronecker oracle");
  int pt_n = 25, pt_trials = 20;
  std::uint64_t pt_seed = 0;
  std::vector<int> pt_ks{0, 1, 2, 3, 4};
  std::vector<double> pt_hs{0.01, 0.1};
  dre::KrylovConfig pt_kcfg;
  ptest->add_option("--n", pt_n, "operator dimension (<= 32)");
  ptest->add_option("--k", pt_ks, "phi orders to test");
  ptest->add_option("--trials", pt_trials, "random instances");
  ptest->add_option("--seed", pt_seed, "seed");
  ptest->add_option("--hs", pt_hs, "step sizes");
  ptest->add_option("--quad-nodes", pt_kcfg.quad_nodes, "quadrature nodes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  try {
    if (solve->parsed()) {
      if (steps_opt->count() > 0) {
        solve_o.spec.adaptive = false;
        solve_o.spec.n_steps = solve_steps;
      } else {
        solve_o.spec.adaptive = true;
      }
      (void)adaptive_tol_given;
      return with_output(solve_o.out_path, [&](std::ostream& out) {
        return dre::cmd_solve(solve_o.spec, out, std::cout, std::cerr);
      });
    }
    if (conv->parsed()) {
      return with_output(conv_o.out_path, [&](std::ostream& out) {
        return dre::cmd_convergence(conv_o.spec, step_list, out, std::cout,
                                    std::cerr);
      });
    }
    if (tstudy->parsed()) {
      return with_output(tol_o.out_path, [&](std::ostream& out) {
        return dre::cmd_tolstudy(tol_o.spec, tol_list, out, std::cout,
                                 std::cerr);
      });
    }
    if (ptest->parsed()) {
      return dre::cmd_phitest(pt_n, pt_ks, pt_trials, pt_seed, pt_hs, pt_kcfg,
                              std::cout, std::cerr);
    }
  } catch (const dre::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const dre::SolverError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
