#include "mr/instances.hpp"

#include <cmath>

#include "mr/errors.hpp"

namespace mr {

Eigen::MatrixXd random_orthonormal(int rows, int cols, Rng& rng) {
  if (cols > rows) throw Error("random_orthonormal needs rows >= cols");
  Eigen::MatrixXd Q(rows, cols);
  for (int j = 0; j < cols; ++j) {
    Eigen::VectorXd v = rng.normal_vector(rows);
    for (int attempt = 0;; ++attempt) {
      for (int i = 0; i < j; ++i) v -= Q.col(i).dot(v) * Q.col(i);
      const double nv = v.norm();
      if (nv > 1e-8) {
        v /= nv;
        break;
      }
      if (attempt > 16) throw Error("random_orthonormal failed to find a new direction");
      v = rng.normal_vector(rows);
    }
    // second Gram-Schmidt pass for orthogonality at machine precision
    for (int i = 0; i < j; ++i) v -= Q.col(i).dot(v) * Q.col(i);
    Q.col(j) = v / v.norm();
  }
  return Q;
}

CompositeProblem random_diagonal_quadratic(int n, double cond, double scale, Rng& rng) {
  if (n < 1 || cond < 1.0 || scale <= 0.0)
    throw Error("random_diagonal_quadratic: need n >= 1, cond >= 1, scale > 0");
  Eigen::VectorXd lams(n);
  lams[0] = scale;
  if (n > 1) lams[n - 1] = scale * cond;
  for (int i = 1; i < n - 1; ++i) lams[i] = scale * std::pow(cond, rng.uniform());
  return make_diagonal_quadratic(lams);
}

CompositeProblem random_lasso(int m, int n, double cond, double gamma, Rng& rng) {
  if (m < n || n < 1 || cond < 1.0 || gamma <= 0.0)
    throw Error("random_lasso: need m >= n >= 1, cond >= 1, gamma > 0");
  const Eigen::MatrixXd U = random_orthonormal(m, n, rng);
  const Eigen::MatrixXd V = random_orthonormal(n, n, rng);
  Eigen::VectorXd sigma(n);
  sigma[0] = 1.0;
  if (n > 1) sigma[n - 1] = std::sqrt(cond);
  for (int i = 1; i < n - 1; ++i) sigma[i] = std::pow(std::sqrt(cond), rng.uniform());
  const Eigen::MatrixXd M = U * sigma.asDiagonal() * V.transpose();
  const Eigen::VectorXd c = rng.normal_vector(m);
  return make_lasso(M, c, gamma);
}

}  // namespace mr
