#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mr/problems.hpp"

namespace mr {

/// Continuous state at time t (time in units of sqrt(s)).
struct OdeState {
  double t = 0.0;
  Eigen::VectorXd X;
  Eigen::VectorXd Xdot;
};

struct RestartedTrajectory {
  std::vector<double> epochs;                 // tau_0 = 0, tau_1, ...
  std::vector<Eigen::VectorXd> restart_points;  // r_0 = x0, r_1, ...
  std::vector<double> interval_lengths;       // E_1, E_2, ... (tau_i = sum)
  std::vector<OdeState> samples;
};

struct SpectralReduction {
  Eigen::MatrixXd Q;        // Q^T diag(lambdas) Q = A
  Eigen::VectorXd lambdas;  // ascending, may contain zeros
  Eigen::VectorXd x_star;
  Eigen::VectorXd y0;       // Q (x0 - x_star)
};

/// Closed-form solution of X''_i + (3/t) X'_i + lambda_i X_i = 0, X(0) = x0,
/// X'(0) = 0:
///   X_i(t) = 2 x_{0,i} J_1(sqrt(lambda_i) t) / (t sqrt(lambda_i)),
///   X'_i(t) = -2 x_{0,i} J_2(sqrt(lambda_i) t) / t.
OdeState closed_form_state(const Eigen::VectorXd& lambdas, const Eigen::VectorXd& x0, double t);

/// S(t) = sum_i x_{0,i}^2 G(sqrt(lambda_i) t) = -(pi t^3 / 4) <grad f(X), Xdot>.
double s_value(const Eigen::VectorXd& lambdas, const Eigen::VectorXd& x0, double t);

/// First time the gradient restart condition fires: first sign change of S,
/// located by grid scan plus bisection. Result is >= 4/(5 sqrt(L)).
double gradient_restart_time(const Eigen::VectorXd& lambdas, const Eigen::VectorXd& x0,
                             double t_max);

/// First time d|Xdot|^2/dt <= 0; never later than the gradient restart time.
double speed_restart_time(const Eigen::VectorXd& lambdas, const Eigen::VectorXd& x0,
                          double t_max);

RestartedTrajectory restarted_trajectory(const Eigen::VectorXd& lambdas,
                                         const Eigen::VectorXd& x0, double horizon,
                                         double sample_dt);

/// Classical RK4 on (X, V), Vdot = -(3/t) V - grad f(X), from t0 = 1e-3/sqrt(L)
/// with the Taylor start X(t0) = x0 - t0^2 grad f(x0)/8, V(t0) = -t0 grad f(x0)/4.
/// step_dt <= 0 selects the default 1e-3/sqrt(L).
std::vector<OdeState> integrate_ode(const CompositeProblem& problem, const Eigen::VectorXd& x0,
                                    double horizon, double step_dt = 0.0);

SpectralReduction reduce_general_quadratic(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                           const Eigen::VectorXd& x0);

}  // namespace mr
