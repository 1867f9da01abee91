#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "mr/analysis.hpp"
#include "mr/errors.hpp"
#include "mr/instances.hpp"
#include "mr/problems.hpp"
#include "mr/random.hpp"
#include "mr/solver.hpp"

using Eigen::VectorXd;

namespace {

mr::SolverTrace run(const mr::CompositeProblem& p, const VectorXd& x0, double s, long iters,
                    mr::RestartKind kind = mr::RestartKind::None, long fixed = 0) {
  mr::StoppingRule stop;
  stop.tol = 0.0;
  stop.max_iter = iters;
  return mr::run_restarted(p, x0, s, mr::ScheduleConfig{}, mr::RestartScheme{kind, fixed}, stop);
}

// test-only oracle: minimize the three-branch max on a refined 2-D grid
double E_grid_oracle(double t, double mu, double L, double s) {
  if (t <= 1.0) return 1.0;
  auto phi = [&](double a, double b) {
    const double p1 = (t - 1.0) * (1.0 + mu / a) / (t * (1.0 - s * L));
    const double p2 = (1.0 + b) * (t - 1.0) / t + s * (a + L);
    const double p3 = (1.0 + 1.0 / b) / t;
    return std::max(p1, std::max(p2, p3));
  };
  double a_lo = mu / 16.0, a_hi = 16.0 * L, b_lo = 1.0 / 32.0, b_hi = 32.0;
  double best = 1e18, best_a = 1.0, best_b = 1.0;
  for (int round = 0; round < 5; ++round) {
    const int grid = 160;
    for (int i = 0; i <= grid; ++i) {
      const double a = a_lo * std::pow(a_hi / a_lo, static_cast<double>(i) / grid);
      for (int j = 0; j <= grid; ++j) {
        const double b = b_lo * std::pow(b_hi / b_lo, static_cast<double>(j) / grid);
        const double v = phi(a, b);
        if (v < best) {
          best = v;
          best_a = a;
          best_b = b;
        }
      }
    }
    const double fa = std::pow(a_hi / a_lo, 1.5 / grid);
    const double fb = std::pow(b_hi / b_lo, 1.5 / grid);
    a_lo = best_a / fa;
    a_hi = best_a * fa;
    b_lo = best_b / fb;
    b_hi = best_b * fb;
  }
  return best;
}

}  // namespace

TEST_CASE("theoretical rho") {
  CHECK(mr::theoretical_rho(1.0, 10.0, 0.09) == doctest::Approx(0.997).epsilon(1e-15));
  CHECK(mr::theoretical_rho(1.0, 1.0, 0.5) == doctest::Approx(1.0 - 0.25 / 3.0).epsilon(1e-15));
  CHECK(mr::theoretical_rho(1.0, 10.0, 1e-13) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(mr::theoretical_rho(1.0, 10.0, 0.2), mr::StepTooLarge);
  // always inside (1 - mu s, 1)
  mr::Rng rng(31);
  for (int i = 0; i < 200; ++i) {
    const double L = rng.log_uniform(0.1, 1e4);
    const double mu = L / rng.log_uniform(1.0, 1e4);
    const double s = rng.uniform(0.05, 0.999) / L;
    const double rho = mr::theoretical_rho(mu, L, s);
    CHECK(rho > 1.0 - mu * s);
    CHECK(rho < 1.0);
  }
}

TEST_CASE("lyapunov series basics") {
  auto p = mr::make_diagonal_quadratic((VectorXd(1) << 1.0).finished());
  auto trace = run(p, VectorXd::Ones(1), 0.1, 5);
  const auto series = mr::lyapunov_series(trace, p, 0.1, trace.schedule);
  CHECK(series.E[0] == doctest::Approx(0.5).epsilon(1e-15));  // 1/2 |x0 - x*|^2
  // hand value at k = 1: t_2 (t_2 - 1) = 1 for the golden ratio
  CHECK(series.E[1] == doctest::Approx(0.4455).epsilon(1e-12));
  for (double e : series.E) CHECK(e >= 0.0);

  // starting at the minimizer the sequence is identically zero
  auto trace0 = run(p, VectorXd::Zero(1), 0.1, 3);
  const auto series0 = mr::lyapunov_series(trace0, p, 0.1, trace0.schedule);
  for (double e : series0.E) CHECK(e == 0.0);
}

TEST_CASE("lyapunov consistency with strong convexity") {
  // E_k >= E_k^p >= s (t_{k+1}-1) t_{k+1} (mu/2) |x_k - x*|^2
  mr::Rng rng(32);
  auto p = mr::random_diagonal_quadratic(8, 60.0, 1.0, rng);
  const double s = 0.9 / p.lipschitz;
  auto trace = run(p, rng.unit_sphere(8), s, 200);
  const auto series = mr::lyapunov_series(trace, p, s, trace.schedule);
  for (std::size_t k = 0; k < series.E.size(); ++k) {
    CHECK(series.E[k] >= series.E_p[k] - 1e-12);
    const double t1 = series.t_used[k];
    const double lower = s * (t1 - 1.0) * t1 * 0.5 * p.mu *
                         (trace.records[k].x - p.reference->x_star).squaredNorm();
    CHECK(series.E_p[k] >= lower - 1e-9);
  }
}

TEST_CASE("certificates pass on clean runs and flag corrupted ones") {
  mr::Rng rng(33);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = static_cast<int>(rng.integer(2, 30));
    auto p = mr::random_diagonal_quadratic(n, rng.log_uniform(2.0, 5000.0), 1.0, rng);
    const double s = 0.9 / p.lipschitz;
    const VectorXd x0 = 2.0 * rng.unit_sphere(n);
    for (auto kind : {mr::RestartKind::None, mr::RestartKind::Gradient}) {
      auto trace = run(p, x0, s, 400, kind);
      const auto cert = mr::check_certificates(trace, p, s);
      CHECK(cert.violations.empty());
      if (!trace.restart_flags().empty()) {
        CHECK(cert.rho_hat.has_value());
        CHECK(*cert.rho_hat < cert.rho);
      }
    }
  }
  // lasso instance
  auto lasso = mr::random_lasso(14, 7, 50.0, 0.4, rng);
  auto ltrace = run(lasso, rng.unit_sphere(7), 0.9 / lasso.lipschitz, 400, mr::RestartKind::Gradient);
  CHECK(mr::check_certificates(ltrace, lasso, ltrace.s).violations.empty());

  // corrupting one iterate produces a violation at that index
  auto p = mr::random_diagonal_quadratic(6, 40.0, 1.0, rng);
  auto trace = run(p, rng.unit_sphere(6), 0.9 / p.lipschitz, 60);
  trace.records[5].x[0] += 10.0;
  const auto cert = mr::check_certificates(trace, p, trace.s);
  CHECK(!cert.violations.empty());
  bool at_5 = false;
  for (const auto& v : cert.violations)
    if (v.k == 5 || v.k == 6) at_5 = true;
  CHECK(at_5);
}

TEST_CASE("single-record trace passes vacuously") {
  auto p = mr::make_diagonal_quadratic((VectorXd(2) << 1.0, 4.0).finished());
  auto trace = run(p, VectorXd::Zero(2), 0.1, 50);  // starts at x*
  REQUIRE(trace.records.size() == 1);
  CHECK(mr::check_certificates(trace, p, 0.1).violations.empty());
}

TEST_CASE("certificates require a reference") {
  auto p = mr::make_diagonal_quadratic((VectorXd(1) << 2.0).finished());
  auto trace = run(p, VectorXd::Ones(1), 0.2, 20);
  p.reference.reset();
  CHECK_THROWS_AS(mr::check_certificates(trace, p, 0.2), mr::MissingReference);
  CHECK_THROWS_AS(mr::lyapunov_series(trace, p, 0.2, trace.schedule), mr::MissingReference);
}

TEST_CASE("restart statistics") {
  VectorXd lams(2);
  lams << 1.0, 100.0;
  auto p = mr::make_diagonal_quadratic(lams);
  auto fixed = run(p, VectorXd::Ones(2), 0.009, 17, mr::RestartKind::Fixed, 5);
  const auto stats = mr::restart_statistics(fixed);
  CHECK(stats.K == std::vector<long>{5, 5, 5});
  CHECK(stats.S == std::vector<long>{0, 5, 10, 15});
  CHECK(stats.m_of(12) == 2);
  CHECK(stats.m_of(16) == 3);
  CHECK(stats.m_of(1) == 0);

  auto plain = run(p, VectorXd::Ones(2), 0.009, 40);
  const auto stats2 = mr::restart_statistics(plain);
  CHECK(stats2.K.empty());
  CHECK(stats2.m_of(25) == 0);

  auto grad = run(p, VectorXd::Ones(2), 0.009, 300, mr::RestartKind::Gradient);
  for (long K : mr::restart_statistics(grad).K) CHECK(K >= 2);
}

TEST_CASE("bounded interval rate") {
  const auto [vartheta, rho_hat] =
      mr::bounded_interval_rate(1.0, 10.0, 0.09, mr::ScheduleConfig{}, 3);
  CHECK(vartheta == doctest::Approx(0.9717905849577415).epsilon(1e-12));
  CHECK(rho_hat == doctest::Approx(0.9717905849577415 * 0.997).epsilon(1e-12));

  // K_bar = 2 keeps only the l = 2 term
  const double t2 = (1.0 + std::sqrt(5.0)) / 2.0;
  const auto [v2, r2] = mr::bounded_interval_rate(1.0, 10.0, 0.09, mr::ScheduleConfig{}, 2);
  CHECK(v2 == doctest::Approx(std::sqrt(std::max(1.0 / t2, 1.0 - 0.09 * (t2 - 1.0)))));
  CHECK(r2 < 0.997);

  mr::Rng rng(34);
  for (int i = 0; i < 50; ++i) {
    const double L = rng.log_uniform(0.5, 1e3);
    const double mu = L / rng.log_uniform(1.0, 1e3);
    const double s = rng.uniform(0.1, 0.99) / L;
    const long kb = rng.integer(2, 60);
    const auto [vt, rh] = mr::bounded_interval_rate(mu, L, s, mr::ScheduleConfig{}, kb);
    CHECK(vt > 0.0);
    CHECK(vt < 1.0);
    CHECK(rh < mr::theoretical_rho(mu, L, s));
  }
}

TEST_CASE("smooth E(t)") {
  const double mu = 1.0, L = 10.0, s = 0.09;
  CHECK(mr::smooth_E_of_t(1.0, mu, L, s) == 1.0);

  double prev = 1.0;
  for (double t : {1.5, 2.0, 5.0, 10.0, 50.0}) {
    const double e = mr::smooth_E_of_t(t, mu, L, s);
    CHECK(e > prev);
    CHECK(e <= (1.0 + std::max(mu / L, 0.125)) / (1.0 - L * s) + 1e-9);
    CHECK(e == doctest::Approx(E_grid_oracle(t, mu, L, s)).epsilon(2e-3));
    prev = e;
  }
  // very large t stays below the closed-form cap
  CHECK(mr::smooth_E_of_t(1e6, mu, L, s) <= (1.0 + std::max(mu / L, 0.125)) / (1.0 - L * s));
}

TEST_CASE("smooth eta sequence") {
  const double mu = 1.0, L = 10.0, s = 0.09;
  const auto eta = mr::smooth_eta_sequence(mr::ScheduleConfig{}, mu, L, s, 400);
  CHECK(eta[0] == doctest::Approx(1.0 - 1.8 / 11.0).epsilon(1e-12));  // 0.83636...
  CHECK(eta[1] == doctest::Approx(0.91).epsilon(1e-12));              // 1 - mu s
  for (std::size_t i = 1; i < eta.size(); ++i) CHECK(eta[i] > eta[i - 1]);
  const double eta_bar_bound = 1.0 - (1.0 - L * s) * mu * s / (1.0 + std::max(mu / L, 0.125));
  CHECK(eta_bar_bound == doctest::Approx(0.992).epsilon(1e-12));
  CHECK(eta.back() <= eta_bar_bound + 1e-12);
  CHECK(eta_bar_bound < mr::theoretical_rho(mu, L, s));
}

TEST_CASE("smooth certificates pass on gradient-restarted smooth runs") {
  VectorXd lams(2);
  lams << 1.0, 100.0;
  auto p = mr::make_diagonal_quadratic(lams);
  auto trace = run(p, VectorXd::Ones(2), 0.009, 600, mr::RestartKind::Gradient);
  const auto cert = mr::smooth_certificates(trace, p, 0.009, trace.schedule);
  CHECK(cert.violations.empty());
  REQUIRE(cert.rho_hat.has_value());
  REQUIRE(cert.vartheta.has_value());
  // eta_hat = vartheta * eta_Kbar < min{rho_hat, eta-limit bound}
  const auto eta = mr::smooth_eta_sequence(trace.schedule, p.mu, p.lipschitz, 0.009, *cert.k_bar);
  const double eta_hat = *cert.vartheta * eta.back();
  const double eta_bar_bound =
      1.0 - (1.0 - p.lipschitz * 0.009) * p.mu * 0.009 / (1.0 + std::max(p.mu / p.lipschitz, 0.125));
  CHECK(eta_hat < *cert.rho_hat);
  CHECK(eta_hat < eta_bar_bound);

  // plain run: single segment, same checks hold
  auto plain = run(p, VectorXd::Ones(2), 0.009, 600);
  CHECK(mr::smooth_certificates(plain, p, 0.009, plain.schedule).violations.empty());

  // composite problems are rejected
  mr::Rng rng(36);
  auto lasso = mr::random_lasso(8, 4, 10.0, 0.3, rng);
  auto ltrace = run(lasso, VectorXd::Ones(4), 0.9 / lasso.lipschitz, 30);
  CHECK_THROWS_AS(mr::smooth_certificates(ltrace, lasso, ltrace.s, ltrace.schedule), mr::Error);
}

TEST_CASE("empirical rate fits") {
  std::vector<double> geo;
  for (int k = 0; k < 60; ++k) geo.push_back(std::pow(0.9, k));
  const auto fit = mr::empirical_rate(geo);
  CHECK(fit.slope == doctest::Approx(std::log(0.9)).epsilon(1e-9));
  CHECK(fit.r2 >= 0.999999);

  std::vector<double> flat(20, 3.5);
  CHECK(mr::empirical_rate(flat).slope == doctest::Approx(0.0));

  std::vector<double> with_zero(20, 1.0);
  with_zero[7] = 0.0;
  CHECK_THROWS_AS(mr::empirical_rate(with_zero), mr::NonPositiveValue);
  CHECK_THROWS_AS(mr::empirical_rate(std::vector<double>(5, 1.0)), mr::Error);
}

TEST_CASE("certificate json shape") {
  VectorXd lams(2);
  lams << 1.0, 16.0;
  auto p = mr::make_diagonal_quadratic(lams);
  auto trace = run(p, VectorXd::Ones(2), 0.05, 120, mr::RestartKind::Gradient);
  const auto cert = mr::check_certificates(trace, p, 0.05);
  const auto j = mr::certificate_to_json(cert);
  CHECK(j.contains("rho"));
  CHECK(j.contains("violations"));
  CHECK(j["passed"].get<bool>() == cert.violations.empty());
}
