#pragma once

#include <Eigen/Core>

namespace varinf {

using Point = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Eigen-decomposition of a real symmetric matrix.
/// Eigenvalues are sorted in decreasing order; column k of `vectors`
/// is the unit eigenvector for `values[k]`.
struct SymmetricEigen {
  Eigen::VectorXd values;
  Matrix vectors;
};

/// Cyclic Jacobi sweeps (row-major pivot order) until the off-diagonal
/// Frobenius mass falls below `tol` times the matrix norm. Only the upper
/// triangle of `a` is read. Ties in the sorted output keep the column
/// order produced by the sweeps, so the result is reproducible.
SymmetricEigen jacobi_eigen(const Matrix& a, double tol = 1e-13);

/// Largest absolute eigenvalue of a symmetric matrix (its operator norm).
/// Closed form for n <= 2, Jacobi otherwise.
double symmetric_operator_norm(const Matrix& a);

/// max_ij |a_ij - a_ji|
double asymmetry(const Matrix& a);

}  // namespace varinf
