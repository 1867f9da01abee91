#pragma once

#include <Eigen/Dense>

#include "mr/problems.hpp"
#include "mr/random.hpp"

namespace mr {

/// Diagonal quadratic with lambda_min = scale, lambda_max = scale * cond and
/// log-uniform interior spectrum.
CompositeProblem random_diagonal_quadratic(int n, double cond, double scale, Rng& rng);

/// Lasso instance whose M has singular values log-spaced so that
/// cond(M^T M) = cond exactly.
CompositeProblem random_lasso(int m, int n, double cond, double gamma, Rng& rng);

/// Orthonormal columns (rows >= cols) from Gram-Schmidt on a Gaussian draw.
Eigen::MatrixXd random_orthonormal(int rows, int cols, Rng& rng);

}  // namespace mr
