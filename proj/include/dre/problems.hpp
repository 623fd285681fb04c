#pragma once

#include <cstdint>
#include <string>

#include "dre/rhs.hpp"

namespace dre {

/// n0 interior grid points per dimension of the unit square; N = n0^2.
struct GridSpec {
  int n0 = 8;
  int initial_rank = 1;
  std::uint64_t seed = 0;
};

/// Penzl-type benchmark: 5-point Laplacian plus central-difference
/// advection  -10 x du/dx - 100 y du/dy  on the unit square with
/// homogeneous Dirichlet boundary conditions, grid spacing
/// delta = 1/(n0+1).  B is the normalized all-ones column and C the
/// normalized all-ones row; X0 = L0 L0^T with L0 drawn from the seeded
/// gaussian generator.
RiccatiProblem advection_diffusion(const GridSpec& spec);

/// Standard-form problem from a generalized system with diagonal positive
/// definite mass matrix:  A = E^(-1/2) A_hat E^(-1/2), B = E^(-1/2) B_hat,
/// C = C_hat E^(-1/2), applied by row/column scaling of the sparse A_hat.
RiccatiProblem load_generalized(const Eigen::VectorXd& E_diag,
                                const Eigen::SparseMatrix<double>& A_hat,
                                const Eigen::MatrixXd& B_hat,
                                const Eigen::MatrixXd& C_hat,
                                const LowRankSym& X0);

enum class InitialFactorMode { gaussian, sin_uniform };

/// Seeded N x r initial factor with D0 = I_r.  Deterministic and
/// bit-reproducible across platforms: mt19937_64 with explicit 53-bit
/// uniform draws; gaussian mode uses Box-Muller, sin_uniform draws
/// sin(z) with z uniform in [0, 2 pi].  r = 0 yields the zero state.
LowRankSym random_initial_factor(Eigen::Index N, Eigen::Index r,
                                 std::uint64_t seed,
                                 InitialFactorMode mode =
                                     InitialFactorMode::gaussian);

/// Matrix Market reader: coordinate, real, general.
Eigen::SparseMatrix<double> read_matrix_market(const std::string& path);

/// Headerless row-major CSV of doubles.
Eigen::MatrixXd read_csv(const std::string& path);

}  // namespace dre
