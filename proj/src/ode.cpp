#include "mr/ode.hpp"

#include <cmath>
#include <string>

#include "mr/bessel.hpp"
#include "mr/errors.hpp"
#include "mr/linalg.hpp"

namespace mr {

namespace {

void check_lambdas(const Eigen::VectorXd& lambdas) {
  if (lambdas.size() == 0 || lambdas.minCoeff() <= 0.0)
    throw NonPositiveLambda("all lambda_i must be positive");
}

// First sign change of `fn` (positive early on): grid scan from t_start with
// spacing h, then bisection keeping fn(lo) > 0, fn(hi) <= 0.
template <typename F>
double first_nonpositive(F&& fn, double t_start, double h, double t_max, const char* what) {
  double lo = t_start;
  double f_lo = fn(lo);
  if (!(f_lo > 0.0))
    throw NoSignChange(std::string(what) + ": not positive at the scan start");
  double hi = lo;
  bool found = false;
  while (hi < t_max) {
    hi = std::min(hi + h, t_max);
    if (fn(hi) <= 0.0) {
      found = true;
      break;
    }
    lo = hi;
  }
  if (!found)
    throw NoSignChange(std::string(what) + ": no sign change before t_max; raise t_max");
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (fn(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return hi;  // fn(hi) <= 0 by construction
}

}  // namespace

OdeState closed_form_state(const Eigen::VectorXd& lambdas, const Eigen::VectorXd& x0, double t) {
  check_lambdas(lambdas);
  if (t < 0.0) throw Error("closed_form_state requires t >= 0");
  const auto n = lambdas.size();
  OdeState state;
  state.t = t;
  state.X.resize(n);
  state.Xdot.resize(n);
  const double lam_max = lambdas.maxCoeff();
  if (t <= 1e-6 / std::sqrt(lam_max)) {
    // leading series terms; avoids the 0/0 at t = 0
    for (Eigen::Index i = 0; i < n; ++i) {
      state.X[i] = x0[i];
      state.Xdot[i] = -lambdas[i] * x0[i] * t / 4.0;
    }
    return state;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sq = std::sqrt(lambdas[i]);
    const double u = sq * t;
    state.X[i] = 2.0 * x0[i] * bessel_j(1, u) / (t * sq);
    state.Xdot[i] = -2.0 * x0[i] * bessel_j(2, u) / t;
  }
  return state;
}

double s_value(const Eigen::VectorXd& lambdas, const Eigen::VectorXd& x0, double t) {
  check_lambdas(lambdas);
  double s = 0.0;
  for (Eigen::Index i = 0; i < lambdas.size(); ++i)
    s += x0[i] * x0[i] * g_kernel(std::sqrt(lambdas[i]) * t);
  return s;
}

double gradient_restart_time(const Eigen::VectorXd& lambdas, const Eigen::VectorXd& x0,
                             double t_max) {
  check_lambdas(lambdas);
  if (x0.norm() == 0.0) throw ZeroInitialPoint("gradient restart time needs x0 != 0");
  const double lam_max = lambdas.maxCoeff();
  const double h = std::min(0.05, 3.141592653589793 / 8.0) / std::sqrt(lam_max);
  const double t_start = 0.5 * 4.0 / (5.0 * std::sqrt(lam_max));
  return first_nonpositive([&](double t) { return s_value(lambdas, x0, t); }, t_start, h,
                           t_max, "gradient restart");
}

double speed_restart_time(const Eigen::VectorXd& lambdas, const Eigen::VectorXd& x0,
                          double t_max) {
  check_lambdas(lambdas);
  if (x0.norm() == 0.0) throw ZeroInitialPoint("speed restart time needs x0 != 0");
  const double lam_max = lambdas.maxCoeff();
  const double h = std::min(0.05, 3.141592653589793 / 8.0) / std::sqrt(lam_max);
  const double t_start = 0.5 * 4.0 / (5.0 * std::sqrt(lam_max));
  // d|Xdot|^2/dt = 2 <Xdot, Xddot>, Xddot = -(3/t) Xdot - Lambda X
  auto deriv = [&](double t) {
    const OdeState st = closed_form_state(lambdas, x0, t);
    const Eigen::VectorXd xddot =
        (-3.0 / t) * st.Xdot - lambdas.cwiseProduct(st.X).eval();
    return 2.0 * st.Xdot.dot(xddot);
  };
  return first_nonpositive(deriv, t_start, h, t_max, "speed restart");
}

RestartedTrajectory restarted_trajectory(const Eigen::VectorXd& lambdas,
                                         const Eigen::VectorXd& x0, double horizon,
                                         double sample_dt) {
  check_lambdas(lambdas);
  if (!(horizon > 0.0) || !(sample_dt > 0.0))
    throw Error("restarted_trajectory requires horizon > 0 and sample_dt > 0");

  RestartedTrajectory traj;
  traj.epochs.push_back(0.0);
  traj.restart_points.push_back(x0);

  const double lam_min = lambdas.minCoeff();
  const double interval_cap = 100.0 * 2.0 * 3.141592653589793 / std::sqrt(lam_min);
  while (traj.epochs.back() < horizon) {
    const Eigen::VectorXd& r = traj.restart_points.back();
    if (r.norm() == 0.0) break;  // landed on the minimizer; flow stays there
    const double E = gradient_restart_time(lambdas, r, interval_cap);
    traj.interval_lengths.push_back(E);
    traj.epochs.push_back(traj.epochs.back() + E);
    traj.restart_points.push_back(closed_form_state(lambdas, r, E).X);
  }

  // stitched samples on the global grid
  std::size_t seg = 0;
  const long n_samples = static_cast<long>(std::floor(horizon / sample_dt + 1e-12));
  for (long j = 0; j <= n_samples; ++j) {
    const double t = static_cast<double>(j) * sample_dt;
    while (seg + 1 < traj.epochs.size() && t > traj.epochs[seg + 1]) ++seg;
    const double t_local = t - traj.epochs[seg];
    OdeState st = closed_form_state(lambdas, traj.restart_points[seg], t_local);
    st.t = t;
    traj.samples.push_back(std::move(st));
  }
  return traj;
}

std::vector<OdeState> integrate_ode(const CompositeProblem& problem, const Eigen::VectorXd& x0,
                                    double horizon, double step_dt) {
  if (!is_zero_g(problem.nonsmooth))
    throw Error("integrate_ode requires a smooth problem (g = 0)");
  const double L = problem.lipschitz;
  const double t0 = 1e-3 / std::sqrt(L);
  const double dt = step_dt > 0.0 ? step_dt : 1e-3 / std::sqrt(L);
  if (!(horizon > t0)) throw Error("horizon must exceed the Taylor start t0");

  auto accel = [&](double t, const Eigen::VectorXd& X, const Eigen::VectorXd& V) {
    return Eigen::VectorXd((-3.0 / t) * V - problem.smooth_grad(X));
  };

  const Eigen::VectorXd g0 = problem.smooth_grad(x0);
  Eigen::VectorXd X = x0 - (t0 * t0 / 8.0) * g0;
  Eigen::VectorXd V = -(t0 / 4.0) * g0;
  double t = t0;

  std::vector<OdeState> out;
  out.push_back({t, X, V});
  while (t + dt <= horizon + 1e-12) {
    const Eigen::VectorXd k1x = V;
    const Eigen::VectorXd k1v = accel(t, X, V);
    const Eigen::VectorXd k2x = V + 0.5 * dt * k1v;
    const Eigen::VectorXd k2v = accel(t + 0.5 * dt, X + 0.5 * dt * k1x, V + 0.5 * dt * k1v);
    const Eigen::VectorXd k3x = V + 0.5 * dt * k2v;
    const Eigen::VectorXd k3v = accel(t + 0.5 * dt, X + 0.5 * dt * k2x, V + 0.5 * dt * k2v);
    const Eigen::VectorXd k4x = V + dt * k3v;
    const Eigen::VectorXd k4v = accel(t + dt, X + dt * k3x, V + dt * k3v);
    X += dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    V += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    t += dt;
    if (!X.allFinite() || !V.allFinite())
      throw NonFiniteState("integrator produced a non-finite state at t = " + std::to_string(t));
    out.push_back({t, X, V});
  }
  return out;
}

SpectralReduction reduce_general_quadratic(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                           const Eigen::VectorXd& x0) {
  const auto eig = jacobi_eigendecomposition(A);  // throws NotSymmetric
  const double wmax = eig.eigenvalues.cwiseAbs().maxCoeff();
  if (eig.eigenvalues.minCoeff() < -1e-10 * std::max(1.0, wmax))
    throw NonPositiveEigenvalue("matrix has a negative eigenvalue");
  const Eigen::VectorXd x_star = spectral_least_squares(eig, -b);
  if ((A * x_star + b).norm() > 1e-10 * (1.0 + b.norm()))
    throw RangeViolation("b is not in Range(A)");
  SpectralReduction red;
  red.Q = eig.eigenvectors.transpose();  // Q^T diag(w) Q = A
  red.lambdas = eig.eigenvalues.cwiseMax(0.0);
  red.x_star = x_star;
  red.y0 = red.Q * (x0 - x_star);
  return red;
}

}  // namespace mr
