#include "mr/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "mr/errors.hpp"

namespace mr {

EigenDecomposition jacobi_eigendecomposition(const Eigen::MatrixXd& A, double sym_tol) {
  const auto n = A.rows();
  if (A.cols() != n) throw NotSymmetric("matrix is not square");
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > sym_tol * scale)
    throw NotSymmetric("matrix is not symmetric");

  Eigen::MatrixXd M = 0.5 * (A + A.transpose());
  Eigen::MatrixXd V = Eigen::MatrixXd::Identity(n, n);

  auto off_norm = [&]() {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) s += M(i, j) * M(i, j);
    return std::sqrt(2.0 * s);
  };

  const double tol = 1e-15 * std::max(1.0, M.norm());
  for (int sweep = 0; sweep < 128 && off_norm() > tol; ++sweep) {
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = M(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double theta = (M(q, q) - M(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double mkp = M(k, p), mkq = M(k, q);
          M(k, p) = c * mkp - s * mkq;
          M(k, q) = s * mkp + c * mkq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double mpk = M(p, k), mqk = M(q, k);
          M(p, k) = c * mpk - s * mqk;
          M(q, k) = s * mpk + c * mqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = V(k, p), vkq = V(k, q);
          V(k, p) = c * vkp - s * vkq;
          V(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  // sort ascending
  EigenDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return M(a, a) < M(b, b); });
  for (Eigen::Index i = 0; i < n; ++i) {
    out.eigenvalues[i] = M(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i)]);
    out.eigenvectors.col(i) = V.col(order[static_cast<std::size_t>(i)]);
  }
  return out;
}

Eigen::VectorXd spectral_least_squares(const EigenDecomposition& eig,
                                       const Eigen::VectorXd& rhs, double rank_tol) {
  const double wmax = eig.eigenvalues.size() ? eig.eigenvalues.cwiseAbs().maxCoeff() : 0.0;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(rhs.size());
  for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i) {
    const double w = eig.eigenvalues[i];
    if (std::abs(w) <= rank_tol * wmax) continue;
    x += (eig.eigenvectors.col(i).dot(rhs) / w) * eig.eigenvectors.col(i);
  }
  return x;
}

}  // namespace mr
