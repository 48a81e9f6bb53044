#include "tubenav/lqr.hpp"

#include <complex>
#include <stdexcept>
#include <vector>

namespace tubenav {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;

MatrixXd solve_care(const MatrixXd& A, const MatrixXd& B, const MatrixXd& Q,
                    const MatrixXd& R) {
  const int n = static_cast<int>(A.rows());
  const MatrixXd Rinv = R.inverse();
  MatrixXd H(2 * n, 2 * n);
  H.topLeftCorner(n, n) = A;
  H.topRightCorner(n, n) = -B * Rinv * B.transpose();
  H.bottomLeftCorner(n, n) = -Q;
  H.bottomRightCorner(n, n) = -A.transpose();

  Eigen::ComplexEigenSolver<MatrixXd> es(H);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("solve_care: eigensolver failed");

  // Stack the eigenvectors of the n stable eigenvalues.
  MatrixXcd basis(2 * n, n);
  int found = 0;
  for (int i = 0; i < 2 * n && found < n; ++i) {
    if (es.eigenvalues()[i].real() < 0) basis.col(found++) = es.eigenvectors().col(i);
  }
  if (found != n)
    throw std::runtime_error("solve_care: Hamiltonian lacks an n-dimensional stable subspace");

  const MatrixXcd X1 = basis.topRows(n);
  const MatrixXcd X2 = basis.bottomRows(n);
  Eigen::FullPivLU<MatrixXcd> lu(X1);
  if (!lu.isInvertible())
    throw std::runtime_error("solve_care: stable subspace is not a graph over the state space");
  MatrixXd P = (X2 * lu.inverse()).real();
  P = 0.5 * (P + P.transpose());

  const MatrixXd residual =
      A.transpose() * P + P * A - P * B * Rinv * B.transpose() * P + Q;
  if (residual.norm() > 1e-6 * std::max(1.0, P.norm()))
    throw std::runtime_error("solve_care: residual too large");
  return P;
}

MatrixXd solve_lyapunov(const MatrixXd& A, const MatrixXd& RHS) {
  const int n = static_cast<int>(A.rows());
  // vec(AᵀP + PA) = (I⊗Aᵀ + Aᵀ⊗I) vec(P) with column-major vec.
  MatrixXd K = MatrixXd::Zero(n * n, n * n);
  const MatrixXd At = A.transpose();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        K(j * n + i, j * n + k) += At(i, k);   // (I⊗Aᵀ)
        K(j * n + i, k * n + i) += At(j, k);   // (Aᵀ⊗I) acting from the right
      }
  Eigen::VectorXd rhs_vec(n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) rhs_vec[j * n + i] = RHS(i, j);
  Eigen::FullPivLU<MatrixXd> lu(K);
  if (!lu.isInvertible())
    throw std::runtime_error("solve_lyapunov: singular Lyapunov operator");
  const Eigen::VectorXd p = lu.solve(rhs_vec);
  MatrixXd P(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) P(i, j) = p[j * n + i];
  P = 0.5 * (P + P.transpose());
  const MatrixXd residual = A.transpose() * P + P * A - RHS;
  if (residual.norm() > 1e-8 * std::max(1.0, P.norm()) + 1e-10)
    throw std::runtime_error("solve_lyapunov: residual too large");
  return P;
}

}  // namespace tubenav
