#pragma once

#include <Eigen/Dense>

namespace mr {

struct EigenDecomposition {
  Eigen::VectorXd eigenvalues;  // ascending
  Eigen::MatrixXd eigenvectors; // columns, orthonormal: A = V diag(w) V^T
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
/// Throws NotSymmetric if max|A - A^T| > sym_tol * max(1, max|A|).
EigenDecomposition jacobi_eigendecomposition(const Eigen::MatrixXd& A,
                                             double sym_tol = 1e-12);

/// Min-norm least-squares solution of A x = rhs for symmetric PSD A via the
/// spectral decomposition; eigenvalues below rank_tol * lambda_max count as zero.
Eigen::VectorXd spectral_least_squares(const EigenDecomposition& eig,
                                       const Eigen::VectorXd& rhs,
                                       double rank_tol = 1e-12);

}  // namespace mr
