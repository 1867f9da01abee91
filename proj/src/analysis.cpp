#include "mr/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "mr/errors.hpp"
#include "mr/prox.hpp"

namespace mr {

namespace {

constexpr double kSlackTol = 1e-8;

struct Segment {
  long start;  // global index of local 0
  long end;    // global index of the last record in the segment
  bool padded; // post-restart segments run on (1, 1, t_2, t_3, ...)
};

std::vector<Segment> split_segments(const SolverTrace& trace) {
  std::vector<Segment> segs;
  const long n = trace.iterations();
  long start = 0;
  bool padded = false;
  for (long k = 1; k <= n; ++k) {
    if (trace.records[static_cast<std::size_t>(k)].restarted) {
      segs.push_back({start, k - 1, padded});
      start = k - 1;  // Algorithm 2 restarts from x_{k-1}
      padded = true;
    }
  }
  segs.push_back({start, n, padded});
  return segs;
}

// t'_kappa for a segment: base sequence for the first segment, the padded
// sequence t'_1 = t'_2 = 1, t'_kappa = t_{kappa-1} afterwards.
double local_t(const std::vector<double>& base, bool padded, long kappa) {
  if (!padded) return base[static_cast<std::size_t>(kappa - 1)];
  if (kappa <= 2) return 1.0;
  return base[static_cast<std::size_t>(kappa - 2)];
}

void require_reference(const CompositeProblem& problem) {
  if (!problem.reference)
    throw MissingReference("problem carries no reference minimizer (x*, F*)");
}

}  // namespace

double theoretical_rho(double mu, double lipschitz, double s) {
  if (!(s > 0.0) || !(s < 1.0 / lipschitz))
    throw StepTooLarge("step must satisfy s < 1/L (strict)");
  if (!(mu > 0.0) || !(mu <= lipschitz)) throw Error("need 0 < mu <= L");
  return 1.0 - (1.0 - lipschitz * s) * mu * s / 3.0;
}

LyapunovSeries lyapunov_series(const SolverTrace& trace, const CompositeProblem& problem,
                               double s, const ScheduleConfig& schedule) {
  require_reference(problem);
  const auto& ref = *problem.reference;
  const long n = trace.iterations();
  const auto base = t_sequence(schedule, n + 3);
  const auto segs = split_segments(trace);

  LyapunovSeries out;
  const auto sz = static_cast<std::size_t>(n + 1);
  out.E.resize(sz);
  out.E_p.resize(sz);
  out.E_m.resize(sz);
  out.segment.resize(sz);
  out.local_k.resize(sz);
  out.t_used.resize(sz);
  for (std::size_t si = 0; si < segs.size(); ++si) {
    const auto& seg = segs[si];
    out.segment_starts.push_back(seg.start);
    const Eigen::VectorXd& x0_local = trace.records[static_cast<std::size_t>(seg.start)].x;
    for (long g = seg.start; g <= seg.end; ++g) {
      const long kappa = g - seg.start;
      const auto& rec = trace.records[static_cast<std::size_t>(g)];
      const Eigen::VectorXd& y = kappa == 0 ? x0_local : rec.y;
      const double t1 = local_t(base, seg.padded, kappa + 1);
      const double ep = s * (t1 - 1.0) * t1 * (problem.F(rec.x) - ref.F_star);
      const double em =
          0.5 * ((t1 - 1.0) * (y - rec.x) + (y - ref.x_star)).squaredNorm();
      const auto gi = static_cast<std::size_t>(g);
      // segment boundaries belong to both segments; keep the fresh-start values
      if (gi < sz && (out.t_used[gi] == 0.0 || kappa == 0)) {
        out.E_p[gi] = ep;
        out.E_m[gi] = em;
        out.E[gi] = ep + em;
        out.segment[gi] = static_cast<int>(si);
        out.local_k[gi] = kappa;
        out.t_used[gi] = t1;
      }
    }
  }
  return out;
}

RateCertificate check_certificates(const SolverTrace& trace, const CompositeProblem& problem,
                                   double s) {
  require_reference(problem);
  const auto& ref = *problem.reference;
  const double mu = problem.mu, L = problem.lipschitz;
  RateCertificate cert;
  cert.rho = theoretical_rho(mu, L, s);
  const double rho = cert.rho;
  const long n = trace.iterations();
  const auto base = t_sequence(trace.schedule, n + 3);
  const auto segs = split_segments(trace);

  auto record = [&](long k, const char* id, double slack, double scale) {
    if (slack < -kSlackTol * scale) cert.violations.push_back({k, id, slack / scale});
  };

  for (const auto& seg : segs) {
    const long len = seg.end - seg.start;
    const Eigen::VectorXd& x0_local = trace.records[static_cast<std::size_t>(seg.start)].x;
    const double d0 = (x0_local - ref.x_star).squaredNorm();

    // Lyapunov values along the segment
    std::vector<double> E(static_cast<std::size_t>(len + 1));
    for (long kappa = 0; kappa <= len; ++kappa) {
      const auto& rec = trace.records[static_cast<std::size_t>(seg.start + kappa)];
      const Eigen::VectorXd& y = kappa == 0 ? x0_local : rec.y;
      const double t1 = local_t(base, seg.padded, kappa + 1);
      E[static_cast<std::size_t>(kappa)] =
          s * (t1 - 1.0) * t1 * (problem.F(rec.x) - ref.F_star) +
          0.5 * ((t1 - 1.0) * (y - rec.x) + (y - ref.x_star)).squaredNorm();
    }

    for (long kappa = 0; kappa < len; ++kappa) {
      const long g = seg.start + kappa;
      const auto ek = E[static_cast<std::size_t>(kappa)];
      const auto ek1 = E[static_cast<std::size_t>(kappa + 1)];
      const double scale = std::max(1.0, std::abs(ek));
      record(g + 1, "lyapunov-decrease", rho * ek - ek1, scale);

      const auto& rec = trace.records[static_cast<std::size_t>(g)];
      const Eigen::VectorXd& y = kappa == 0 ? x0_local : rec.y;
      const double t1 = local_t(base, seg.padded, kappa + 1);
      const Eigen::VectorXd gs = gradient_mapping(problem, s, y);
      const double rhs = -(s * s * t1 * t1 * (1.0 - s * L) / 2.0) * gs.squaredNorm() -
                         (mu * s * (t1 - 1.0) * t1 / 2.0) * (y - rec.x).squaredNorm() -
                         (mu * s * t1 / 2.0) * (y - ref.x_star).squaredNorm();
      record(g + 1, "lyapunov-difference", rhs - (ek1 - ek), scale);
    }

    for (long kappa = 1; kappa <= len; ++kappa) {
      const long g = seg.start + kappa;
      const auto& rec = trace.records[static_cast<std::size_t>(g)];
      const double t1 = local_t(base, seg.padded, kappa + 1);
      if (t1 > 1.0) {
        const double bound = std::pow(rho, kappa) * d0 / (2.0 * s * (t1 - 1.0) * t1);
        record(g, "objective-bound", bound - (problem.F(rec.x) - ref.F_star),
               std::max(1.0, bound));
      }
      const double tk = local_t(base, seg.padded, kappa);
      const double theta = std::max(1.0 / tk, 1.0 - mu * s * (tk - 1.0));
      const double bound2 =
          (1.0 - mu * s) * theta * std::pow(rho, kappa - 1) * d0;
      record(g, "sequence-bound", bound2 - (rec.x - ref.x_star).squaredNorm(),
             std::max(1.0, bound2));
    }
  }

  // Global restarted sequence bound, valid for restarted and plain runs alike.
  const double d0 = (trace.records[0].x - ref.x_star).squaredNorm();
  for (long k = 1; k <= n; ++k) {
    const auto& rec = trace.records[static_cast<std::size_t>(k)];
    const double bound = (1.0 - mu * s) * std::pow(rho, k - 1) * d0;
    record(k, "restart-global-bound", bound - (rec.x - ref.x_star).squaredNorm(),
           std::max(1.0, bound));
  }

  // Improved factor under the observed interval bound.
  const auto stats = restart_statistics(trace);
  if (!stats.K.empty()) {
    long k_bar = 2;
    for (long K : stats.K) k_bar = std::max(k_bar, K);
    k_bar = std::max(k_bar, n - stats.S.back());
    const auto [vartheta, rho_hat] = bounded_interval_rate(mu, L, s, trace.schedule, k_bar);
    cert.vartheta = vartheta;
    cert.rho_hat = rho_hat;
    cert.k_bar = k_bar;
    for (long k = 1; k <= n; ++k) {
      const auto& rec = trace.records[static_cast<std::size_t>(k)];
      const double bound = (1.0 - mu * s) * std::pow(rho_hat, k - 1) * d0;
      record(k, "bounded-interval-bound", bound - (rec.x - ref.x_star).squaredNorm(),
             std::max(1.0, bound));
    }
  }

  return cert;
}

RestartStatistics restart_statistics(const SolverTrace& trace) {
  RestartStatistics stats;
  stats.S.push_back(0);
  long prev = 0;
  for (long f : trace.restart_flags()) {
    stats.K.push_back(f - prev);
    stats.S.push_back(f);
    prev = f;
  }
  std::vector<long> s_copy = stats.S;
  stats.m_of = [s_copy](long k) {
    long m = 0;
    for (std::size_t i = 0; i < s_copy.size(); ++i)
      if (s_copy[i] < k) m = static_cast<long>(i);
    return m;
  };
  return stats;
}

std::pair<double, double> bounded_interval_rate(double mu, double lipschitz, double s,
                                                const ScheduleConfig& schedule, long k_bar) {
  if (k_bar < 2) throw Error("bounded_interval_rate requires K_bar >= 2");
  const double rho = theoretical_rho(mu, lipschitz, s);
  const auto t = t_sequence(schedule, k_bar + 1);
  double vartheta = 0.0;
  for (long l = 2; l <= k_bar; ++l) {
    const double tl = t[static_cast<std::size_t>(l - 1)];
    const double theta = std::max(1.0 / tl, 1.0 - mu * s * (tl - 1.0));
    vartheta = std::max(vartheta, std::pow(theta, 1.0 / static_cast<double>(l)));
  }
  return {vartheta, vartheta * rho};
}

double smooth_E_of_t(double t, double mu, double lipschitz, double s) {
  if (!(s > 0.0) || !(s < 1.0 / lipschitz))
    throw StepTooLarge("step must satisfy s < 1/L (strict)");
  if (!(t >= 1.0)) throw Error("smooth_E_of_t requires t >= 1");
  if (t == 1.0) return 1.0;
  const double one_m_ls = 1.0 - lipschitz * s;

  // phi_1(a) = e  =>  a = mu / (t (1-Ls) e/(t-1) - 1)
  // phi_3(b) = e  =>  b = 1 / (t e - 1)
  auto mismatch = [&](double e) {
    const double a = mu / (t * one_m_ls * e / (t - 1.0) - 1.0);
    const double b = 1.0 / (t * e - 1.0);
    return (1.0 + b) * (t - 1.0) / t + s * (a + lipschitz) - e;
  };

  double lo = std::max(1.0, (t - 1.0) / (t * one_m_ls)) * (1.0 + 1e-14) + 1e-14;
  double hi = 3.0 / one_m_ls;
  if (!(mismatch(lo) > 0.0) || !(mismatch(hi) < 0.0))
    throw NoRoot("E(t) bisection bracket failed");
  for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, lo); ++it) {
    const double mid = 0.5 * (lo + hi);
    (mismatch(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> smooth_eta_sequence(const ScheduleConfig& schedule, double mu,
                                        double lipschitz, double s, long horizon) {
  if (horizon < 1) throw Error("smooth_eta_sequence requires horizon >= 1");
  std::vector<double> eta;
  eta.reserve(static_cast<std::size_t>(horizon + 1));
  eta.push_back(1.0 - 2.0 * mu * lipschitz * s / (mu + lipschitz));
  const auto t = t_sequence(schedule, horizon);
  for (long k = 1; k <= horizon; ++k)
    eta.push_back(1.0 - mu * s / smooth_E_of_t(t[static_cast<std::size_t>(k - 1)], mu,
                                               lipschitz, s));
  return eta;
}

RateCertificate smooth_certificates(const SolverTrace& trace, const CompositeProblem& problem,
                                    double s, const ScheduleConfig& schedule) {
  require_reference(problem);
  if (!is_zero_g(problem.nonsmooth))
    throw Error("smooth certificates require g = 0");
  const auto& ref = *problem.reference;
  const double mu = problem.mu, L = problem.lipschitz;
  const long n = trace.iterations();

  RateCertificate cert;
  cert.rho = theoretical_rho(mu, L, s);
  const auto eta = smooth_eta_sequence(schedule, mu, L, s, std::max<long>(n, 1));
  cert.eta = std::vector<double>(eta.begin(),
                                 eta.begin() + std::min<std::size_t>(eta.size(), 16));

  auto record = [&](long k, const char* id, double slack, double scale) {
    if (slack < -kSlackTol * scale) cert.violations.push_back({k, id, slack / scale});
  };

  // Product bound of the eta sequence (holds for restarted and plain runs).
  const double d0 = (trace.records[0].x - ref.x_star).squaredNorm();
  double log_prod = 0.0;
  for (long k = 1; k <= n; ++k) {
    log_prod += std::log(eta[static_cast<std::size_t>(k - 1)]);
    const double bound = std::exp(log_prod) * d0;
    const auto& rec = trace.records[static_cast<std::size_t>(k)];
    record(k, "eta-product", bound - (rec.x - ref.x_star).squaredNorm(), std::max(1.0, bound));
  }

  // Bounded-interval refinement.
  const auto stats = restart_statistics(trace);
  if (!stats.K.empty()) {
    long k_bar = 2;
    for (long K : stats.K) k_bar = std::max(k_bar, K);
    k_bar = std::max(k_bar, n - stats.S.back());
    const auto [vartheta, rho_hat] = bounded_interval_rate(mu, L, s, schedule, k_bar);
    cert.vartheta = vartheta;
    cert.rho_hat = rho_hat;
    cert.k_bar = k_bar;
    const double eta_kbar = eta[static_cast<std::size_t>(std::min<long>(k_bar, n))];
    double log_hat = 0.0;
    for (long k = 1; k <= n; ++k) {
      const double eta_i = k - 1 == 0
                               ? eta[0]
                               : vartheta * std::min(eta[static_cast<std::size_t>(k - 1)], eta_kbar);
      log_hat += std::log(eta_i);
      const double bound = std::exp(log_hat) * d0;
      const auto& rec = trace.records[static_cast<std::size_t>(k)];
      record(k, "eta-hat-product", bound - (rec.x - ref.x_star).squaredNorm(),
             std::max(1.0, bound));
    }
  }

  // Lyapunov upper bound at (a, b) = (1, 1), per segment.
  const auto series = lyapunov_series(trace, problem, s, schedule);
  for (long k = 0; k <= n; ++k) {
    const auto ki = static_cast<std::size_t>(k);
    const auto& rec = trace.records[ki];
    const long seg_start = series.segment_starts[static_cast<std::size_t>(series.segment[ki])];
    const Eigen::VectorXd& y =
        series.local_k[ki] == 0 ? trace.records[static_cast<std::size_t>(seg_start)].x : rec.y;
    const double t1 = series.t_used[ki];
    const double a = s * (t1 - 1.0) * t1;
    const double bound = a * (1.0 + mu) / (2.0 * mu) * problem.smooth_grad(y).squaredNorm() +
                         (y - ref.x_star).squaredNorm() +
                         (2.0 * (t1 - 1.0) * (t1 - 1.0) + a * (1.0 + L)) / 2.0 *
                             (y - rec.x).squaredNorm();
    record(k, "lyapunov-upper", bound - series.E[ki], std::max(1.0, bound));
  }

  return cert;
}

RateFit empirical_rate(const std::vector<double>& series) {
  if (series.size() < 10) throw Error("empirical_rate requires at least 10 values");
  for (double v : series)
    if (!(v > 0.0)) throw NonPositiveValue("empirical_rate requires positive values");
  const auto n = static_cast<double>(series.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < series.size(); ++k) {
    const double x = static_cast<double>(k), y = std::log(series[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  RateFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - fit.slope * sx) / n;
  double ss_res = 0.0, ss_tot = 0.0;
  const double mean = sy / n;
  for (std::size_t k = 0; k < series.size(); ++k) {
    const double y = std::log(series[k]);
    const double f = fit.slope * static_cast<double>(k) + intercept;
    ss_res += (y - f) * (y - f);
    ss_tot += (y - mean) * (y - mean);
  }
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

nlohmann::json certificate_to_json(const RateCertificate& cert) {
  nlohmann::json v = nlohmann::json::array();
  for (const auto& viol : cert.violations)
    v.push_back({{"k", viol.k}, {"id", viol.id}, {"slack", viol.slack}});
  nlohmann::json j = {{"rho", cert.rho}, {"violations", v}, {"passed", cert.passed()}};
  if (cert.rho_hat) j["rho_hat"] = *cert.rho_hat;
  if (cert.vartheta) j["vartheta"] = *cert.vartheta;
  if (cert.k_bar) j["k_bar"] = *cert.k_bar;
  if (cert.eta) j["eta_head"] = *cert.eta;
  return j;
}

}  // namespace mr
