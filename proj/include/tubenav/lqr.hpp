#pragma once

#include <Eigen/Dense>

namespace tubenav {

// Solves the continuous-time algebraic Riccati equation
//   AᵀP + PA − PBR⁻¹BᵀP + Q = 0
// by the Hamiltonian eigenvector method (stable invariant subspace).
// Throws std::runtime_error when no stabilizing solution exists or the
// residual is not small.
Eigen::MatrixXd solve_care(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                           const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R);

// Solves AᵀP + PA = RHS for symmetric P via Kronecker vectorization.
// A must have no pair of eigenvalues summing to zero (Hurwitz A suffices).
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& RHS);

}  // namespace tubenav
