#include "mr/prox.hpp"

#include <cmath>

#include "mr/errors.hpp"

namespace mr {

Eigen::VectorXd prox(const NonsmoothSpec& g, double s, const Eigen::VectorXd& y) {
  if (!(s > 0.0)) throw InvalidStep("prox step must be positive");
  return std::visit(
      [&](const auto& spec) -> Eigen::VectorXd {
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, ZeroG>) {
          return y;
        } else if constexpr (std::is_same_v<T, L1G>) {
          const double thr = s * spec.weight;
          Eigen::VectorXd z(y.size());
          for (Eigen::Index i = 0; i < y.size(); ++i) {
            const double a = std::abs(y[i]) - thr;
            z[i] = a > 0.0 ? (y[i] > 0.0 ? a : -a) : 0.0;  // ties map to exactly 0
          }
          return z;
        } else if constexpr (std::is_same_v<T, SquaredL2G>) {
          return Eigen::VectorXd(y / (1.0 + s * spec.weight));
        } else if constexpr (std::is_same_v<T, BoxIndicatorG>) {
          return Eigen::VectorXd(y.cwiseMax(spec.lo).cwiseMin(spec.hi));
        } else {
          return spec.prox(y, s);
        }
      },
      g);
}

ProxResult prox_result(const NonsmoothSpec& g, double s, const Eigen::VectorXd& y) {
  Eigen::VectorXd z = prox(g, s, y);
  const bool moved = (z - y).cwiseAbs().maxCoeff() > 1e-15;
  return ProxResult{std::move(z), moved};
}

Eigen::VectorXd gradient_mapping(const CompositeProblem& problem, double s,
                                 const Eigen::VectorXd& y) {
  if (!(s > 0.0)) throw InvalidStep("gradient mapping step must be positive");
  return (y - prox(problem.nonsmooth, s, y - s * problem.smooth_grad(y))) / s;
}

}  // namespace mr
