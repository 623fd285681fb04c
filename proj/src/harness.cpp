#include "dre/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>

#include "dre/error.hpp"
#include "dre/oracle.hpp"

namespace dre {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

RiccatiProblem make_problem(const RunSpec& spec) {
  const bool have_files = !spec.a_path.empty();
  if (!spec.builtin.empty() && have_files) {
    throw UsageError("exactly one problem source allowed (builtin or files)");
  }
  if (have_files) {
    if (spec.b_path.empty() || spec.c_path.empty()) {
      throw UsageError("file problem source needs --a, --b and --c");
    }
    Eigen::SparseMatrix<double> A_hat = read_matrix_market(spec.a_path);
    Eigen::MatrixXd B_hat = read_csv(spec.b_path);
    Eigen::MatrixXd C_hat = read_csv(spec.c_path);
    const Eigen::Index N = A_hat.rows();
    const LowRankSym X0 = random_initial_factor(
        N, spec.initial_rank, spec.seed, InitialFactorMode::sin_uniform);
    if (!spec.e_path.empty()) {
      const Eigen::MatrixXd E = read_csv(spec.e_path);
      Eigen::VectorXd e_diag =
          Eigen::Map<const Eigen::VectorXd>(E.data(), E.size());
      return load_generalized(e_diag, A_hat, B_hat, C_hat, X0);
    }
    RiccatiProblem problem{std::move(A_hat), std::move(C_hat),
                           std::move(B_hat), X0};
    problem.validate();
    return problem;
  }
  if (spec.builtin == "advdiff") {
    return advection_diffusion({spec.n0, spec.initial_rank, spec.seed});
  }
  throw UsageError("unknown builtin problem '" + spec.builtin + "'");
}

namespace {

Method checked_method(const RunSpec& spec, bool need_embedded) {
  Method m;
  try {
    m = parse_method(spec.method);
  } catch (const SolverError& e) {
    throw UsageError(e.what());
  }
  if (need_embedded && !method_is_embedded(m)) {
    throw UsageError("method " + spec.method +
                     " has no embedded pair; use exprb32 or exprb43");
  }
  return m;
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& csv) {
  csv << "t,h,error_estimate,rank,fro_norm,rejects\n";
  for (std::size_t i = 0; i < traj.steps.size(); ++i) {
    const double norm =
        (i + 1 < traj.states.size()) ? fro_norm(traj.states[i + 1])
                                     : fro_norm(traj.final_state);
    csv << format_double(traj.times[i + 1]) << ','
        << format_double(traj.steps[i]) << ','
        << format_double(traj.error_estimates[i]) << ',' << traj.ranks[i]
        << ',' << format_double(norm) << ',' << traj.reject_counts[i] << '\n';
  }
}

Eigen::MatrixXd oracle_reference(const RiccatiProblem& problem, double t_end) {
  if (problem.dim() > oracle::kDenseCap) {
    throw UsageError("problem dimension " + std::to_string(problem.dim()) +
                     " exceeds the dense oracle cap " +
                     std::to_string(oracle::kDenseCap) +
                     "; use a smaller n0");
  }
  return oracle::dense_solve(problem, t_end, 1e-12);
}

double relative_error(const LowRankSym& x, const Eigen::MatrixXd& ref) {
  return (x.dense() - ref).norm() / ref.norm();
}

}  // namespace

int cmd_solve(const RunSpec& spec, std::ostream& csv, std::ostream& summary,
              std::ostream& diag) {
  const Method m = checked_method(spec, spec.adaptive);
  const RiccatiProblem problem = make_problem(spec);

  const auto t0 = std::chrono::steady_clock::now();
  Trajectory traj;
  std::string failure;
  if (spec.adaptive) {
    ControllerConfig cfg = spec.controller;
    cfg.Atol = spec.atol;
    cfg.Rtol = spec.rtol;
    traj = solve_adaptive_partial(problem, m, cfg, spec.t_end, spec.step,
                                  true, &failure);
  } else {
    traj = solve_fixed(problem, m, spec.n_steps, spec.t_end, spec.step, true);
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  write_trajectory_csv(traj, csv);
  if (!failure.empty()) {
    diag << "error: " << failure << "\n";
    return 1;
  }
  summary << "method " << method_name(m) << ": " << traj.accepted_steps()
          << " steps, " << traj.total_rejects() << " rejects, final norm "
          << format_double(fro_norm(traj.final_state)) << ", final rank "
          << traj.final_state.rank() << ", wall " << wall << " s\n";
  return 0;
}

int cmd_convergence(const RunSpec& spec, const std::vector<int>& step_counts,
                    std::ostream& csv, std::ostream& summary,
                    std::ostream& diag) {
  const Method m = checked_method(spec, false);
  if (step_counts.empty()) throw UsageError("empty step list");
  const RiccatiProblem problem = make_problem(spec);
  const Eigen::MatrixXd ref = oracle_reference(problem, spec.t_end);

  std::vector<double> errs;
  csv << "n_steps,rel_error\n";
  for (int n : step_counts) {
    const Trajectory traj =
        solve_fixed(problem, m, n, spec.t_end, spec.step);
    const double err = relative_error(traj.final_state, ref);
    errs.push_back(err);
    csv << n << ',' << format_double(err) << '\n';
  }
  if (step_counts.size() >= 2) {
    const double slope = fitted_order(step_counts, errs);
    summary << "fitted order " << format_double(slope) << "\n";
  } else {
    summary << "single row, no slope\n";
  }
  (void)diag;
  return 0;
}

int cmd_tolstudy(const RunSpec& spec, const std::vector<double>& tols,
                 std::ostream& csv, std::ostream& summary,
                 std::ostream& diag) {
  const Method m = checked_method(spec, true);
  if (tols.empty()) throw UsageError("empty tolerance list");
  const RiccatiProblem problem = make_problem(spec);
  const Eigen::MatrixXd ref = oracle_reference(problem, spec.t_end);

  csv << "tol,steps,rejects,rel_error\n";
  double prev_err = 0.0;
  bool first = true, monotone = true;
  for (double tol : tols) {
    ControllerConfig cfg = spec.controller;
    cfg.Atol = cfg.Rtol = tol;
    const Trajectory traj =
        solve_adaptive(problem, m, cfg, spec.t_end, spec.step);
    const double err = relative_error(traj.final_state, ref);
    csv << format_double(tol) << ',' << traj.accepted_steps() << ','
        << traj.total_rejects() << ',' << format_double(err) << '\n';
    if (!first && err > prev_err) monotone = false;
    prev_err = err;
    first = false;
  }
  if (!monotone) {
    summary << "note: errors not monotone in tolerance\n";
  }
  (void)diag;
  return 0;
}

namespace {

double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

Eigen::MatrixXd random_matrix(std::mt19937_64& gen, Eigen::Index rows,
                              Eigen::Index cols) {
  Eigen::MatrixXd M(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      M(i, j) = 2.0 * uniform01(gen) - 1.0;
    }
  }
  return M;
}

}  // namespace

int cmd_phitest(int N, const std::vector<int>& ks, int trials,
                std::uint64_t seed, const std::vector<double>& hs,
                const KrylovConfig& kcfg, std::ostream& report,
                std::ostream& diag) {
  if (N < 1 || N > oracle::kKroneckerCap) {
    throw UsageError("phitest: N must lie in [1, " +
                     std::to_string(oracle::kKroneckerCap) + "]");
  }
  for (int k : ks) {
    if (k < 0 || k > 4) {
      throw UsageError("phitest: unsupported k = " + std::to_string(k));
    }
  }
  if (trials < 1) throw UsageError("phitest: trials must be >= 1");

  std::mt19937_64 gen(seed);
  double max_err = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    // Random stable-ish sparse A, a thin G factor and a random state.
    Eigen::MatrixXd Ad = random_matrix(gen, N, N);
    Ad -= (1.0 + 0.5 * N) * Eigen::MatrixXd::Identity(N, N);
    const Eigen::SparseMatrix<double> A = Ad.sparseView();
    const Eigen::MatrixXd B = random_matrix(gen, N, std::min(N, 2));
    const Eigen::Index rs = std::min<Eigen::Index>(N, 3);
    const LowRankSym state(random_matrix(gen, N, rs),
                           Eigen::MatrixXd::Identity(rs, rs) / N);
    const ClosedLoopOperator op(A, B, state);
    const Eigen::MatrixXd An =
        Ad - state.dense() * (B * B.transpose());

    const Eigen::Index rm = std::min<Eigen::Index>(N, 2);
    Eigen::MatrixXd core = random_matrix(gen, rm, rm);
    const LowRankSym M(random_matrix(gen, N, rm),
                       0.5 * (core + core.transpose()));

    int kmax = 0;
    for (int k : ks) kmax = std::max(kmax, k);
    for (double h : hs) {
      const std::vector<Eigen::MatrixXd> wants =
          oracle::dense_phi_lyap_all(An, h, kmax, M.dense());
      for (int k : ks) {
        const LowRankSym got = phi_lyap(op, h, k, M, kcfg, 1e-13);
        const Eigen::MatrixXd& want = wants[static_cast<std::size_t>(k)];
        const double denom = std::max(want.norm(), 1e-300);
        const double err = (got.dense() - want).norm() / denom;
        max_err = std::max(max_err, err);
      }
    }
  }
  report << "phitest: N=" << N << " trials=" << trials
         << " max_rel_err=" << format_double(max_err) << "\n";
  if (max_err > 1e-8) {
    diag << "error: phi kernel exceeds 1e-8 relative against the dense "
            "oracle\n";
    return 1;
  }
  report << "phitest: PASS\n";
  return 0;
}

double fitted_order(const std::vector<int>& ns,
                    const std::vector<double>& errs) {
  const std::size_t m = ns.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double x = std::log(static_cast<double>(ns[i]));
    const double y = std::log(errs[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return -slope;
}

}  // namespace dre
