#include "mr/solver.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "mr/errors.hpp"
#include "mr/prox.hpp"

namespace mr {

RestartScheme RestartScheme::parse(const std::string& text) {
  RestartScheme s;
  if (text == "none") {
    s.kind = RestartKind::None;
  } else if (text == "gradient") {
    s.kind = RestartKind::Gradient;
  } else if (text == "function") {
    s.kind = RestartKind::Function;
  } else if (text == "speed") {
    s.kind = RestartKind::Speed;
  } else if (text.rfind("fixed:", 0) == 0) {
    s.kind = RestartKind::Fixed;
    s.fixed_interval = std::stol(text.substr(6));
    if (s.fixed_interval < 2) throw Error("fixed restart interval must be >= 2");
  } else {
    throw Error("unknown restart scheme: " + text);
  }
  return s;
}

std::string RestartScheme::to_string() const {
  switch (kind) {
    case RestartKind::None: return "none";
    case RestartKind::Gradient: return "gradient";
    case RestartKind::Function: return "function";
    case RestartKind::Speed: return "speed";
    case RestartKind::Fixed: return "fixed:" + std::to_string(fixed_interval);
  }
  return "none";
}

std::vector<long> SolverTrace::restart_flags() const {
  std::vector<long> flags;
  for (const auto& r : records)
    if (r.restarted) flags.push_back(r.k);
  return flags;
}

double stopping_residual(const CompositeProblem& problem, double s, const Eigen::VectorXd& y) {
  return gradient_mapping(problem, s, y).norm();
}

namespace {

void check_step(const CompositeProblem& problem, double s) {
  if (!(s > 0.0) || !(s < 1.0 / problem.lipschitz))
    throw StepTooLarge("step must satisfy s < 1/L (strict), got s = " + std::to_string(s));
}

void check_finite(const Eigen::VectorXd& x, long k) {
  if (!x.allFinite())
    throw NonFiniteIterate("non-finite iterate at step " + std::to_string(k));
}

double effective_tol(const StoppingRule& stop, const Eigen::VectorXd& x0) {
  return stop.tol ? *stop.tol : 1e-10 * (1.0 + x0.norm());
}

}  // namespace

SolverTrace run_apg(const CompositeProblem& problem, const Eigen::VectorXd& x0, double s,
                    const ScheduleConfig& schedule_config, const StoppingRule& stop) {
  check_step(problem, s);
  const auto t_start = std::chrono::steady_clock::now();

  SolverTrace trace;
  trace.s = s;
  trace.scheme = RestartScheme{RestartKind::None, 0};
  trace.schedule = schedule_config;
  trace.tol = effective_tol(stop, x0);
  trace.max_iter = stop.max_iter;
  trace.problem_json = problem_to_json(problem);

  Schedule schedule(schedule_config);
  Eigen::VectorXd x_prev = x0;
  Eigen::VectorXd y_prev = x0;
  trace.records.push_back({0, x0, x0, problem.F(x0), 0.0, false});

  for (long k = 1; k <= stop.max_iter; ++k) {
    const Eigen::VectorXd z = prox(problem.nonsmooth, s, y_prev - s * problem.smooth_grad(y_prev));
    const double res = (y_prev - z).norm() / s;
    trace.records.back().grad_map_norm = res;
    if (res <= trace.tol) {
      trace.converged = true;
      break;
    }
    check_finite(z, k);
    const auto step = schedule.advance();
    const Eigen::VectorXd y = z + step.beta * (z - x_prev);
    trace.records.push_back({k, z, y, problem.F(z), 0.0, false});
    x_prev = z;
    y_prev = y;
  }
  if (!trace.converged) {
    const double res = stopping_residual(problem, s, y_prev);
    trace.records.back().grad_map_norm = res;
    trace.converged = res <= trace.tol;
  }

  trace.wall_time_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return trace;
}

SolverTrace run_restarted(const CompositeProblem& problem, const Eigen::VectorXd& x0, double s,
                          const ScheduleConfig& schedule_config, const RestartScheme& scheme,
                          const StoppingRule& stop) {
  if (scheme.kind == RestartKind::None) {
    SolverTrace trace = run_apg(problem, x0, s, schedule_config, stop);
    trace.scheme = scheme;
    return trace;
  }
  if (scheme.kind == RestartKind::Fixed && scheme.fixed_interval < 2)
    throw Error("fixed restart interval must be >= 2");
  check_step(problem, s);
  const auto t_start = std::chrono::steady_clock::now();

  SolverTrace trace;
  trace.s = s;
  trace.scheme = scheme;
  trace.schedule = schedule_config;
  trace.tol = effective_tol(stop, x0);
  trace.max_iter = stop.max_iter;
  trace.problem_json = problem_to_json(problem);

  Schedule schedule(schedule_config);
  Eigen::VectorXd x_prev = x0;       // x_{k-1}
  Eigen::VectorXd x_prev2 = x0;      // x_{k-2}, for the speed scheme
  Eigen::VectorXd y_prev = x0;
  trace.records.push_back({0, x0, x0, problem.F(x0), 0.0, false});

  for (long k = 1; k <= stop.max_iter; ++k) {
    const Eigen::VectorXd z = prox(problem.nonsmooth, s, y_prev - s * problem.smooth_grad(y_prev));
    const double res = (y_prev - z).norm() / s;
    trace.records.back().grad_map_norm = res;
    if (res <= trace.tol) {
      trace.converged = true;
      break;
    }
    check_finite(z, k);

    bool fire = false;
    switch (scheme.kind) {
      case RestartKind::Gradient:
        fire = (z - x_prev).dot(y_prev - z) > 0.0;  // strict; ties do not restart
        break;
      case RestartKind::Function:
        fire = problem.F(z) > problem.F(x_prev);
        break;
      case RestartKind::Speed:
        fire = k >= 2 && (z - x_prev).norm() < (x_prev - x_prev2).norm();
        break;
      case RestartKind::Fixed:
        fire = k % scheme.fixed_interval == 0;
        break;
      case RestartKind::None:
        break;
    }

    Eigen::VectorXd x_k, y_k;
    if (fire) {
      trace.discarded_trials.emplace_back(k, z);
      x_k = prox(problem.nonsmooth, s, x_prev - s * problem.smooth_grad(x_prev));
      check_finite(x_k, k);
      y_k = x_k;
      schedule.reset();
    } else {
      x_k = z;
      const auto step = schedule.advance();
      y_k = x_k + step.beta * (x_k - x_prev);
    }
    trace.records.push_back({k, x_k, y_k, problem.F(x_k), 0.0, fire});
    x_prev2 = x_prev;
    x_prev = x_k;
    y_prev = y_k;
  }
  if (!trace.converged) {
    const double res = stopping_residual(problem, s, y_prev);
    trace.records.back().grad_map_norm = res;
    trace.converged = res <= trace.tol;
  }

  trace.wall_time_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return trace;
}

// ---------------------------------------------------------------------------
// Persistence

namespace {

std::string fp17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

nlohmann::json vec_json(const Eigen::VectorXd& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Eigen::VectorXd vec_from(const nlohmann::json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = j.at(i).get<double>();
  return v;
}

}  // namespace

void write_trace_csv(const SolverTrace& trace, const CompositeProblem& problem,
                     const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path);
  out << "k,F,dist2_to_xstar,grad_map_norm,restarted\n";
  for (const auto& r : trace.records) {
    const double d2 = problem.reference
                          ? (r.x - problem.reference->x_star).squaredNorm()
                          : std::numeric_limits<double>::quiet_NaN();
    out << r.k << ',' << fp17(r.F) << ',' << fp17(d2) << ',' << fp17(r.grad_map_norm) << ','
        << (r.restarted ? 1 : 0) << '\n';
  }
}

nlohmann::json trace_to_json(const SolverTrace& trace) {
  nlohmann::json x = nlohmann::json::array(), y = nlohmann::json::array();
  nlohmann::json F = nlohmann::json::array(), g = nlohmann::json::array(),
                 restarted = nlohmann::json::array();
  for (const auto& r : trace.records) {
    x.push_back(vec_json(r.x));
    y.push_back(vec_json(r.y));
    F.push_back(r.F);
    g.push_back(r.grad_map_norm);
    restarted.push_back(r.restarted ? 1 : 0);
  }
  const auto flags = trace.restart_flags();
  nlohmann::json K = nlohmann::json::array(), S = nlohmann::json::array();
  S.push_back(0);
  long prev = 0;
  for (long f : flags) {
    K.push_back(f - prev);
    S.push_back(f);
    prev = f;
  }
  nlohmann::json trials = nlohmann::json::array();
  for (const auto& [k, z] : trace.discarded_trials)
    trials.push_back({{"k", k}, {"z", vec_json(z)}});
  return {{"settings",
           {{"s", trace.s},
            {"scheme", trace.scheme.to_string()},
            {"schedule", trace.schedule.to_string()},
            {"tol", trace.tol},
            {"max_iter", trace.max_iter},
            {"converged", trace.converged}}},
          {"problem", trace.problem_json},
          {"restarts", {{"K", K}, {"S", S}}},
          {"wall_time_sec", trace.wall_time_sec},
          {"iterates",
           {{"x", x}, {"y", y}, {"F", F}, {"grad_map_norm", g}, {"restarted", restarted}}},
          {"discarded_trials", trials}};
}

SolverTrace trace_from_json(const nlohmann::json& j) {
  SolverTrace trace;
  const auto& settings = j.at("settings");
  trace.s = settings.at("s").get<double>();
  trace.scheme = RestartScheme::parse(settings.at("scheme").get<std::string>());
  trace.schedule = ScheduleConfig::parse(settings.at("schedule").get<std::string>());
  trace.tol = settings.at("tol").get<double>();
  trace.max_iter = settings.at("max_iter").get<long>();
  trace.converged = settings.at("converged").get<bool>();
  trace.problem_json = j.at("problem");
  trace.wall_time_sec = j.at("wall_time_sec").get<double>();
  const auto& it = j.at("iterates");
  const auto n_rec = it.at("x").size();
  for (std::size_t k = 0; k < n_rec; ++k) {
    TraceRecord r;
    r.k = static_cast<long>(k);
    r.x = vec_from(it.at("x").at(k));
    r.y = vec_from(it.at("y").at(k));
    r.F = it.at("F").at(k).get<double>();
    r.grad_map_norm = it.at("grad_map_norm").at(k).get<double>();
    r.restarted = it.at("restarted").at(k).get<int>() != 0;
    trace.records.push_back(std::move(r));
  }
  for (const auto& t : j.at("discarded_trials"))
    trace.discarded_trials.emplace_back(t.at("k").get<long>(), vec_from(t.at("z")));
  return trace;
}

}  // namespace mr
