#pragma once

#include <Eigen/Dense>

#include "mr/problems.hpp"

namespace mr {

struct ProxResult {
  Eigen::VectorXd z;
  bool moved;  // max_i |z_i - y_i| > 1e-15
};

/// prox_{s g}(y) = argmin_z { 1/2 |y-z|^2 + s g(z) }.
/// Throws InvalidStep if s <= 0.
Eigen::VectorXd prox(const NonsmoothSpec& g, double s, const Eigen::VectorXd& y);

ProxResult prox_result(const NonsmoothSpec& g, double s, const Eigen::VectorXd& y);

/// G_s(y) = (y - prox_{s g}(y - s grad f(y))) / s; equals grad f(y) when g = 0.
Eigen::VectorXd gradient_mapping(const CompositeProblem& problem, double s,
                                 const Eigen::VectorXd& y);

}  // namespace mr
