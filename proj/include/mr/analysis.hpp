#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mr/problems.hpp"
#include "mr/solver.hpp"

namespace mr {

/// Lyapunov values along a trace. Restart segments are certified separately:
/// each segment restarts the sequence at its own initial point x_{f-1} (f the
/// restart flag index) and, because the schedule index resets to 1, runs on the
/// padded parameter sequence (1, 1, t_2, t_3, ...). `segment` and `local_k`
/// identify the segment-local position of every global index.
struct LyapunovSeries {
  std::vector<double> E;    // E_k = E_p + E_m, one per trace record
  std::vector<double> E_p;  // s (t_{k+1}-1) t_{k+1} (F(x_k) - F*)
  std::vector<double> E_m;  // 1/2 | (t_{k+1}-1)(y_k - x_k) + (y_k - x*) |^2
  std::vector<int> segment;
  std::vector<long> local_k;
  std::vector<double> t_used;      // the t_{k+1} entering E_k
  std::vector<long> segment_starts;  // global index of each segment's local 0
};

struct Violation {
  long k = 0;          // global trace index
  std::string id;      // inequality identifier
  double slack = 0.0;  // negative slack normalized by the check's scale
};

struct RateCertificate {
  double rho = 0.0;
  std::optional<double> rho_hat;
  std::optional<double> vartheta;
  std::optional<long> k_bar;            // observed interval bound behind rho_hat
  std::optional<std::vector<double>> eta;  // smooth-case sequence head
  std::vector<Violation> violations;

  bool passed() const { return violations.empty(); }
};

/// rho = 1 - (1 - L s) mu s / 3, guaranteed in (1 - mu s, 1).
double theoretical_rho(double mu, double lipschitz, double s);

LyapunovSeries lyapunov_series(const SolverTrace& trace, const CompositeProblem& problem,
                               double s, const ScheduleConfig& schedule);

/// Per-step certificate checks: Lyapunov contraction, the Lyapunov difference
/// inequality, the objective bound, the per-segment sequence bound and the
/// global restarted sequence bound. A violation is slack < -1e-8 * scale.
RateCertificate check_certificates(const SolverTrace& trace, const CompositeProblem& problem,
                                   double s);

struct RestartStatistics {
  std::vector<long> K;  // interval lengths between restart flags
  std::vector<long> S;  // cumulative: S_0 = 0, then the flag indices
  std::function<long(long)> m_of;  // restarts before step k
};

RestartStatistics restart_statistics(const SolverTrace& trace);

/// vartheta_{K_bar} = max_{l=2..K_bar} (max{1/t_l, 1 - mu s (t_l - 1)})^{1/l}
/// and rho_hat = vartheta * rho < rho.
std::pair<double, double> bounded_interval_rate(double mu, double lipschitz, double s,
                                                const ScheduleConfig& schedule, long k_bar);

/// Smooth-case contraction envelope E(t): the three-branch max is equalized by
/// bisection on e in (1, 3/(1-Ls)); E(1) = 1, strictly increasing, bounded by
/// (1 + max{mu/L, 1/8})/(1 - Ls).
double smooth_E_of_t(double t, double mu, double lipschitz, double s);

/// eta_0 = 1 - 2 mu L s/(mu+L); eta_k = 1 - mu s / E(t_k) for k >= 1.
/// Returns eta_0..eta_horizon (horizon+1 values), strictly increasing.
std::vector<double> smooth_eta_sequence(const ScheduleConfig& schedule, double mu,
                                        double lipschitz, double s, long horizon);

/// Smooth-only (g = 0) checks: the eta product bound on |x_k - x*|^2, the
/// bounded-interval refinement with eta_hat_i = vartheta * min{eta_i, eta_Kbar},
/// and the Lyapunov upper bound at (a, b) = (1, 1).
RateCertificate smooth_certificates(const SolverTrace& trace, const CompositeProblem& problem,
                                    double s, const ScheduleConfig& schedule);

struct RateFit {
  double slope = 0.0;
  double r2 = 0.0;
};

/// Ordinary least squares of ln(v_k) against k. Requires >= 10 positive values.
RateFit empirical_rate(const std::vector<double>& series);

nlohmann::json certificate_to_json(const RateCertificate& cert);

}  // namespace mr
