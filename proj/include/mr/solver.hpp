#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mr/problems.hpp"
#include "mr/schedules.hpp"

namespace mr {

enum class RestartKind { None, Gradient, Function, Speed, Fixed };

struct RestartScheme {
  RestartKind kind = RestartKind::None;
  long fixed_interval = 0;  // Fixed: >= 2

  static RestartScheme parse(const std::string& text);  // none|gradient|function|speed|fixed:K
  std::string to_string() const;
};

struct StoppingRule {
  std::optional<double> tol;  // default 1e-10 * (1 + |x0|)
  long max_iter = 100000;
};

struct TraceRecord {
  long k = 0;
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  double F = 0.0;
  double grad_map_norm = 0.0;
  bool restarted = false;
};

/// Full per-iteration record of a solver run plus the settings needed to
/// replay or certify it.
struct SolverTrace {
  std::vector<TraceRecord> records;

  double s = 0.0;
  RestartScheme scheme;
  ScheduleConfig schedule;
  double tol = 0.0;
  long max_iter = 0;
  bool converged = false;
  double wall_time_sec = 0.0;
  nlohmann::json problem_json;

  // discarded trial iterates z_k at restart steps
  std::vector<std::pair<long, Eigen::VectorXd>> discarded_trials;

  long iterations() const { return static_cast<long>(records.size()) - 1; }
  std::vector<long> restart_flags() const;
};

/// Algorithm: accelerated proximal-gradient iteration
///   x_{k+1} = y_k - s G_s(y_k),  y_{k+1} = x_{k+1} + beta_{k+1}(x_{k+1} - x_k).
/// Requires 0 < s < 1/L strictly.
SolverTrace run_apg(const CompositeProblem& problem, const Eigen::VectorXd& x0, double s,
                    const ScheduleConfig& schedule, const StoppingRule& stop);

/// Restarted variant: per step the trial z_k = prox_{sg}(y_{k-1} - s grad f(y_{k-1}))
/// is kept unless the scheme fires, in which case x_k is the proximal-gradient
/// step from x_{k-1}, y_k = x_k and the schedule index resets to 1.
SolverTrace run_restarted(const CompositeProblem& problem, const Eigen::VectorXd& x0, double s,
                          const ScheduleConfig& schedule, const RestartScheme& scheme,
                          const StoppingRule& stop);

/// |G_s(y)|, the residual used for termination.
double stopping_residual(const CompositeProblem& problem, double s, const Eigen::VectorXd& y);

// Persistence: CSV (k, F, dist2_to_xstar, grad_map_norm, restarted) plus a JSON
// sidecar holding settings, restart bookkeeping, wall time and the full iterates.
void write_trace_csv(const SolverTrace& trace, const CompositeProblem& problem,
                     const std::string& path);
nlohmann::json trace_to_json(const SolverTrace& trace);
SolverTrace trace_from_json(const nlohmann::json& j);

}  // namespace mr
