#pragma once

#include <Eigen/Dense>

#include <vector>

#include "dre/rhs.hpp"

namespace dre::oracle {

// Dense brute-force references for small instances.  Never used in the
// production path; everything here is O(N^2) storage or worse.

inline constexpr Eigen::Index kDenseCap = 64;
inline constexpr Eigen::Index kKroneckerCap = 32;

/// Scalar phi-functions: phi_0(z) = e^z, phi_k(z) = int_0^1 e^((1-t)z)
/// t^(k-1)/(k-1)! dt.  Series for small |z|, upward recurrence otherwise.
double phi_scalar(int k, double z);

/// Literal dense evaluation of A X + X A^T + C^T C - X B B^T X.
Eigen::MatrixXd dense_rhs(const RiccatiProblem& problem,
                          const Eigen::MatrixXd& X);

/// Integrate the dense DRE from X_start over [0, t_span] with an embedded
/// Dormand-Prince 5(4) pair at relative tolerance rtol.
Eigen::MatrixXd integrate_dense(const RiccatiProblem& problem,
                                const Eigen::MatrixXd& X_start, double t_span,
                                double rtol);

/// Dense reference solution X(t_end) starting from the problem's X0.
Eigen::MatrixXd dense_solve(const RiccatiProblem& problem, double t_end,
                            double rtol);

/// phi_k(h*Lyap)[M] where Lyap[X] = An X + X An^T, evaluated through the
/// N^2 x N^2 Kronecker lift  I (x) An + An (x) I  and an augmented-matrix
/// exponential.  k in [0, 4]; N capped at kKroneckerCap.
Eigen::MatrixXd dense_phi_lyap(const Eigen::MatrixXd& An, double h, int k,
                               const Eigen::MatrixXd& M);

/// All of phi_0..phi_kmax applied to M in one augmented exponential; entry
/// k of the result equals dense_phi_lyap(An, h, k, M).
std::vector<Eigen::MatrixXd> dense_phi_lyap_all(const Eigen::MatrixXd& An,
                                                double h, int kmax,
                                                const Eigen::MatrixXd& M);

/// Equilibrium X* with ||F(X*)|| <= tol * ||X*||, found by integrating the
/// dense DRE over doubling horizons.
Eigen::MatrixXd steady_state(const RiccatiProblem& problem, double tol);

}  // namespace dre::oracle
