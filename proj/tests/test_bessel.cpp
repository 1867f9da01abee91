#include <doctest.h>

#include <cmath>

#include "mr/bessel.hpp"
#include "mr/errors.hpp"

namespace {

// test-only oracle for small arguments: ascending series in long double,
// written independently of the library branch selection
long double small_series(int q, long double u) {
  const long double half = u / 2.0L;
  long double term = half;
  for (int i = 2; i <= q; ++i) term *= half / i;
  long double sum = 0.0L;
  for (int p = 0; p < 120; ++p) {
    sum += term;
    term *= -(half * half) / ((p + 1.0L) * (p + 1.0L + q));
    if (std::abs(term) < 1e-25L && p > u) break;
  }
  return sum;
}

}  // namespace

TEST_CASE("series values at zero and near zero") {
  CHECK(mr::bessel_j(1, 0.0) == 0.0);
  CHECK(mr::bessel_j(2, 0.0) == 0.0);
  CHECK(std::abs(mr::bessel_j(1, 0.001) - 0.0005) <= 1e-10);
}

TEST_CASE("reference values") {
  // frozen from an external reference implementation
  CHECK(mr::bessel_j(1, 1.0) == doctest::Approx(0.44005058574493355).epsilon(1e-12));
  CHECK(mr::bessel_j(2, 1.0) == doctest::Approx(0.1149034849319005).epsilon(1e-12));
  CHECK(mr::bessel_j(1, 5.0) == doctest::Approx(-0.3275791375914652).epsilon(1e-12));
  CHECK(mr::bessel_j(2, 5.0) == doctest::Approx(0.04656511627775229).epsilon(1e-10));
  CHECK(mr::bessel_j(1, 30.0) == doctest::Approx(-0.11875106261662291).epsilon(1e-10));
  CHECK(mr::bessel_j(2, 30.0) == doctest::Approx(0.07845124607326538).epsilon(1e-10));
  CHECK(mr::bessel_j(1, 50.0) == doctest::Approx(-0.09751182812517514).epsilon(1e-9));
  CHECK(mr::bessel_j(2, 50.0) == doctest::Approx(-0.05971280079425882).epsilon(1e-9));
}

TEST_CASE("agreement with the independent small-argument oracle") {
  for (double u = 0.0; u <= 10.0; u += 0.05) {
    CHECK(std::abs(mr::bessel_j(1, u) - static_cast<double>(small_series(1, u))) < 1e-12);
    CHECK(std::abs(mr::bessel_j(2, u) - static_cast<double>(small_series(2, u))) < 1e-12);
  }
}

TEST_CASE("first positive zero of J1") {
  // bisection on the oracle series
  long double lo = 3.0L, hi = 4.5L;
  REQUIRE(small_series(1, lo) > 0.0L);
  REQUIRE(small_series(1, hi) < 0.0L);
  for (int i = 0; i < 80; ++i) {
    const long double mid = (lo + hi) / 2.0L;
    (small_series(1, mid) > 0.0L ? lo : hi) = mid;
  }
  const double j11 = static_cast<double>((lo + hi) / 2.0L);
  CHECK(std::abs(j11 - 3.8317060) <= 1e-6);
  CHECK(std::abs(mr::bessel_j(1, j11)) < 1e-12);
}

TEST_CASE("series and asymptotic branches agree across the crossover band") {
  for (double u = 28.0; u <= 32.0; u += 0.01) {
    CHECK(std::abs(mr::bessel_j_series(1, u) - mr::bessel_j_asymptotic(1, u)) < 1e-9);
    CHECK(std::abs(mr::bessel_j_series(2, u) - mr::bessel_j_asymptotic(2, u)) < 1e-9);
  }
  CHECK(mr::bessel_eval(1, 29.0).method == mr::BesselMethod::Series);
  CHECK(mr::bessel_eval(1, 31.0).method == mr::BesselMethod::Asymptotic);
}

TEST_CASE("derivative identity d/du [J1(u)/u] = -J2(u)/u") {
  const double h = 1e-5;
  for (double u = 0.1; u <= 40.0; u += 0.37) {
    const double fwd = mr::bessel_j(1, u + h) / (u + h);
    const double bwd = mr::bessel_j(1, u - h) / (u - h);
    const double lhs = (fwd - bwd) / (2.0 * h);
    CHECK(std::abs(lhs + mr::bessel_j(2, u) / u) <= 1e-6);
  }
}

TEST_CASE("asymptotic amplitude envelope") {
  for (double u = 10.0; u <= 200.0; u += 0.11)
    CHECK(std::abs(mr::bessel_j(1, u)) * std::sqrt(u) <= std::sqrt(2.0 / 3.141592653589793) + 0.05);
}

TEST_CASE("restart kernel G") {
  CHECK(mr::g_kernel(0.0) == 0.0);
  CHECK(std::abs(mr::g_kernel(3.8317059702075125)) < 1e-10);  // zero of J1
  CHECK(mr::g_kernel(1.0) == doctest::Approx(3.141592653589793 * 0.44005058574493355 *
                                             0.1149034849319005)
                                 .epsilon(1e-10));
  CHECK(mr::g_kernel(1.0) > 0.0);

  // cos(2u) approximation: the deviation decays like 1/u, so the 0.05 band
  // holds from u ~ 75 on; on [40, 200] the deviation stays below 0.10
  double max_tail = 0.0, max_all = 0.0;
  for (double u = 40.0; u <= 200.0; u += 0.1) {
    const double d = std::abs(mr::g_kernel(u) - std::cos(2.0 * u));
    max_all = std::max(max_all, d);
    if (u >= 75.0) max_tail = std::max(max_tail, d);
  }
  CHECK(max_tail <= 0.05);
  CHECK(max_all <= 0.10);
}

TEST_CASE("argument validation") {
  CHECK_THROWS_AS(mr::bessel_j(1, -0.5), mr::NegativeArgument);
  CHECK_THROWS_AS(mr::bessel_j(3, 1.0), mr::Error);
}
