#include "dre/problems.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include "dre/error.hpp"

namespace dre {

RiccatiProblem advection_diffusion(const GridSpec& spec) {
  if (spec.n0 < 2) throw SolverError("advection_diffusion: n0 must be >= 2");
  const int n0 = spec.n0;
  const Eigen::Index N = static_cast<Eigen::Index>(n0) * n0;
  const double delta = 1.0 / (n0 + 1);
  const double d2 = 1.0 / (delta * delta);

  // Row-major grid index: (i, j) -> j * n0 + i, with x_i = (i+1) delta,
  // y_j = (j+1) delta over interior points only.
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(5 * static_cast<std::size_t>(N));
  for (int j = 0; j < n0; ++j) {
    const double y = (j + 1) * delta;
    for (int i = 0; i < n0; ++i) {
      const double x = (i + 1) * delta;
      const Eigen::Index row = static_cast<Eigen::Index>(j) * n0 + i;
      const double ax = 10.0 * x / (2.0 * delta);   // -10 x du/dx, central
      const double ay = 100.0 * y / (2.0 * delta);  // -100 y du/dy, central
      trip.emplace_back(row, row, -4.0 * d2);
      if (i > 0) trip.emplace_back(row, row - 1, d2 + ax);
      if (i < n0 - 1) trip.emplace_back(row, row + 1, d2 - ax);
      if (j > 0) trip.emplace_back(row, row - n0, d2 + ay);
      if (j < n0 - 1) trip.emplace_back(row, row + n0, d2 - ay);
    }
  }
  Eigen::SparseMatrix<double> A(N, N);
  A.setFromTriplets(trip.begin(), trip.end());

  const double s = 1.0 / std::sqrt(static_cast<double>(N));
  RiccatiProblem problem{
      std::move(A),
      Eigen::MatrixXd::Constant(1, N, s),  // C
      Eigen::MatrixXd::Constant(N, 1, s),  // B
      random_initial_factor(N, spec.initial_rank, spec.seed)};
  return problem;
}

RiccatiProblem load_generalized(const Eigen::VectorXd& E_diag,
                                const Eigen::SparseMatrix<double>& A_hat,
                                const Eigen::MatrixXd& B_hat,
                                const Eigen::MatrixXd& C_hat,
                                const LowRankSym& X0) {
  const Eigen::Index N = A_hat.rows();
  if (E_diag.size() != N) {
    throw DimensionError("load_generalized: E diagonal has wrong length");
  }
  for (Eigen::Index i = 0; i < N; ++i) {
    if (!(E_diag(i) > 0.0)) {
      throw SolverError("load_generalized: nonpositive E entry at index " +
                        std::to_string(i));
    }
  }
  const Eigen::VectorXd s = E_diag.cwiseSqrt().cwiseInverse();  // E^(-1/2)

  Eigen::SparseMatrix<double> A = A_hat;
  for (Eigen::Index j = 0; j < A.outerSize(); ++j) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, j); it; ++it) {
      it.valueRef() *= s(it.row()) * s(it.col());
    }
  }
  RiccatiProblem problem{std::move(A), C_hat * s.asDiagonal(),
                         s.asDiagonal() * B_hat, X0};
  problem.validate();
  return problem;
}

namespace {

// 53-bit uniform in [0, 1); explicit so the stream is identical on every
// platform for a given mt19937_64 seed.
double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

}  // namespace

LowRankSym random_initial_factor(Eigen::Index N, Eigen::Index r,
                                 std::uint64_t seed, InitialFactorMode mode) {
  if (r < 0) throw SolverError("random_initial_factor: r must be >= 0");
  if (r == 0) return LowRankSym(N);
  std::mt19937_64 gen(seed);
  Eigen::MatrixXd L(N, r);
  if (mode == InitialFactorMode::gaussian) {
    // Box-Muller on explicit 53-bit uniforms.
    bool have_spare = false;
    double spare = 0.0;
    for (Eigen::Index j = 0; j < r; ++j) {
      for (Eigen::Index i = 0; i < N; ++i) {
        if (have_spare) {
          L(i, j) = spare;
          have_spare = false;
        } else {
          double u1 = uniform01(gen);
          while (u1 == 0.0) u1 = uniform01(gen);
          const double u2 = uniform01(gen);
          const double mag = std::sqrt(-2.0 * std::log(u1));
          L(i, j) = mag * std::cos(2.0 * M_PI * u2);
          spare = mag * std::sin(2.0 * M_PI * u2);
          have_spare = true;
        }
      }
    }
  } else {
    for (Eigen::Index j = 0; j < r; ++j) {
      for (Eigen::Index i = 0; i < N; ++i) {
        L(i, j) = std::sin(2.0 * M_PI * uniform01(gen));
      }
    }
  }
  return LowRankSym(std::move(L),
                    Eigen::MatrixXd::Identity(r, r));
}

Eigen::SparseMatrix<double> read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SolverError("cannot open matrix market file: " + path);
  std::string line;
  if (!std::getline(in, line)) {
    throw SolverError("empty matrix market file: " + path);
  }
  {
    std::istringstream hdr(line);
    std::string banner, object, format, field, symmetry;
    hdr >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket" || object != "matrix" ||
        format != "coordinate" || field != "real" || symmetry != "general") {
      throw SolverError(
          "unsupported matrix market header (need 'matrix coordinate real "
          "general'): " + line);
    }
  }
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '%') break;
  }
  Eigen::Index rows = 0, cols = 0;
  long long nnz = 0;
  {
    std::istringstream sz(line);
    if (!(sz >> rows >> cols >> nnz)) {
      throw SolverError("bad matrix market size line: " + line);
    }
  }
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(nnz));
  for (long long k = 0; k < nnz; ++k) {
    Eigen::Index i = 0, j = 0;
    double v = 0.0;
    if (!(in >> i >> j >> v)) {
      throw SolverError("truncated matrix market file: " + path);
    }
    trip.emplace_back(i - 1, j - 1, v);  // 1-based on disk
  }
  Eigen::SparseMatrix<double> A(rows, cols);
  A.setFromTriplets(trip.begin(), trip.end());
  return A;
}

Eigen::MatrixXd read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SolverError("cannot open csv file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      row.push_back(std::stod(cell));
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw SolverError("ragged csv file: " + path);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw SolverError("empty csv file: " + path);
  Eigen::MatrixXd M(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[i][j];
    }
  }
  return M;
}

}  // namespace dre
