#include <doctest.h>

#include <cmath>

#include "mr/errors.hpp"
#include "mr/schedules.hpp"

TEST_CASE("classic schedule values") {
  mr::Schedule s(mr::ScheduleConfig{});  // classic
  const auto step1 = s.advance();
  CHECK(step1.beta == 0.0);
  CHECK(step1.t_next == doctest::Approx((1.0 + std::sqrt(5.0)) / 2.0).epsilon(1e-15));
  const auto step2 = s.advance();
  const double t2 = (1.0 + std::sqrt(5.0)) / 2.0;
  const double t3 = (1.0 + std::sqrt(1.0 + 4.0 * t2 * t2)) / 2.0;
  CHECK(t3 == doctest::Approx(2.193527085331054).epsilon(1e-12));
  CHECK(step2.t_next == doctest::Approx(t3).epsilon(1e-15));
  CHECK(step2.beta == doctest::Approx((t2 - 1.0) / t3).epsilon(1e-15));
}

TEST_CASE("polynomial schedule values") {
  auto cfg = mr::ScheduleConfig::parse("poly:r=2");
  mr::Schedule s(cfg);
  CHECK(s.advance().t_next == doctest::Approx(1.5));      // t_2
  const auto step2 = s.advance();                          // returns t_3, beta_2
  CHECK(step2.t_next == doctest::Approx(2.0));
  CHECK(step2.beta == doctest::Approx(0.25));              // (t_2-1)/t_3 = 1/(1+3)
}

TEST_CASE("strongly convex constant schedule") {
  mr::ScheduleConfig cfg;
  cfg.kind = mr::ScheduleKind::StronglyConvexConstant;
  cfg.mu = 1.0;
  cfg.lipschitz = 4.0;
  mr::Schedule s(cfg);
  for (int i = 0; i < 5; ++i) CHECK(s.advance().beta == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("reset") {
  mr::Schedule s(mr::ScheduleConfig{});
  for (int i = 0; i < 10; ++i) s.advance();
  s.reset();
  CHECK(s.advance().beta == 0.0);

  auto cfg = mr::ScheduleConfig::parse("poly:r=3");
  mr::Schedule p(cfg);
  for (int i = 0; i < 4; ++i) p.advance();
  p.reset();
  CHECK(p.t_lookahead() == doctest::Approx(4.0 / 3.0));  // t_2 = (1+3)/3

  p.reset();
  p.reset();  // idempotent
  CHECK(p.t_current() == 1.0);
  CHECK(p.index() == 0);
}

TEST_CASE("nesterov rule validation") {
  CHECK(mr::validate_nesterov_rule(mr::ScheduleConfig::parse("classic"), 1000));
  CHECK(mr::validate_nesterov_rule(mr::ScheduleConfig::parse("poly:r=2"), 1000));
  CHECK_FALSE(mr::validate_nesterov_rule(mr::ScheduleConfig::parse("poly:r=1.5"), 1000));
  CHECK_FALSE(mr::validate_nesterov_rule(mr::ScheduleConfig::parse("sc-const"), 10));
}

TEST_CASE("classic recursion is the equality case") {
  const auto t = mr::t_sequence(mr::ScheduleConfig{}, 10000);
  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    CHECK(std::abs(t[k + 1] * t[k + 1] - t[k + 1] - t[k] * t[k]) <= 1e-10 * t[k] * t[k]);
  }
}

TEST_CASE("t_k growth and beta range") {
  for (const char* name : {"classic", "poly:r=2", "poly:r=4"}) {
    const auto cfg = mr::ScheduleConfig::parse(name);
    const auto t = mr::t_sequence(cfg, 2000);
    for (std::size_t k = 1; k < t.size(); ++k) {
      CHECK(t[k] < static_cast<double>(k + 1));  // t_k < k for k >= 2
    }
    mr::Schedule s(cfg);
    for (int i = 0; i < 500; ++i) {
      const double beta = s.advance().beta;
      CHECK(beta >= 0.0);
      CHECK(beta < 1.0);
    }
  }
  const auto t = mr::t_sequence(mr::ScheduleConfig{}, 2000);
  for (std::size_t k = 100; k < t.size(); ++k) {
    const double ratio = t[k] / static_cast<double>(k + 1);
    CHECK(ratio >= 0.4);
    CHECK(ratio <= 0.6);
  }
}

TEST_CASE("config string round trip") {
  for (const char* name : {"classic", "poly:r=2", "sc-const"}) {
    CHECK(mr::ScheduleConfig::parse(name).to_string() == name);
  }
  CHECK_THROWS_AS(mr::ScheduleConfig::parse("fibonacci"), mr::Error);
}
