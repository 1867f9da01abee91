#include "mr/bessel.hpp"

#include <cmath>

#include "mr/errors.hpp"

namespace mr {

namespace {

constexpr double kCrossover = 30.0;
constexpr double kPi = 3.141592653589793238462643;

// Ascending series J_q(u) = sum_p (-1)^p / (p! (p+q)!) (u/2)^{2p+q}.
// The partial terms reach ~I_q(u) (~3e19 at u = 50), so double accumulation
// would lose everything to cancellation; terms and the compensated sum are
// kept in __float128.
double series_j(int q, double u) {
  if (u == 0.0) return 0.0;
  const __float128 half_u = static_cast<__float128>(u) / 2;
  const __float128 z = half_u * half_u;
  __float128 term = half_u;  // (u/2)^q / q!
  for (int i = 2; i <= q; ++i) term *= half_u / i;
  __float128 sum = 0, comp = 0;
  for (int p = 0; p < 500; ++p) {
    // Kahan step
    const __float128 yk = term - comp;
    const __float128 tk = sum + yk;
    comp = (tk - sum) - yk;
    sum = tk;
    term *= -z / ((p + 1) * (p + 1 + q));
    __float128 mag = term < 0 ? -term : term;
    __float128 smag = sum < 0 ? -sum : sum;
    if (mag < 1e-18q * smag && p > u / 2) break;
  }
  return static_cast<double>(sum);
}

// Hankel expansion J_q(u) ~ sqrt(2/(pi u)) [P cos(chi) - Q sin(chi)],
// chi = u - pi/4 - q pi/2, with correction terms through (8u)^{-8}; the first
// omitted term is ~2e-12 at u = 30.
double asymptotic_j(int q, double u) {
  const double mu4 = 4.0 * q * q;
  double a = 1.0;  // a_k = prod_{j=1..k} (mu - (2j-1)^2) / (k! 8^k)
  double p_sum = 1.0, q_sum = 0.0;
  const double inv_u = 1.0 / u;
  double u_pow = 1.0;
  for (int k = 1; k <= 8; ++k) {
    const double odd = 2.0 * k - 1.0;
    a *= (mu4 - odd * odd) / (8.0 * k);
    u_pow *= inv_u;
    const double term = a * u_pow;
    if (k % 2 == 1) {
      q_sum += (k % 4 == 1) ? term : -term;
    } else {
      p_sum += (k % 4 == 2) ? -term : term;
    }
  }
  const double chi = u - kPi / 4.0 - q * kPi / 2.0;
  return std::sqrt(2.0 / (kPi * u)) * (p_sum * std::cos(chi) - q_sum * std::sin(chi));
}

}  // namespace

double bessel_j(int q, double u) { return bessel_eval(q, u).value; }

double bessel_j_series(int q, double u) { return series_j(q, u); }
double bessel_j_asymptotic(int q, double u) { return asymptotic_j(q, u); }

BesselEval bessel_eval(int q, double u) {
  if (q != 1 && q != 2) throw Error("bessel order must be 1 or 2");
  if (u < 0.0) throw NegativeArgument("bessel argument must be nonnegative");
  BesselEval out;
  out.order = q;
  out.argument = u;
  if (u <= kCrossover) {
    out.method = BesselMethod::Series;
    out.value = series_j(q, u);
  } else {
    out.method = BesselMethod::Asymptotic;
    out.value = asymptotic_j(q, u);
  }
  return out;
}

double g_kernel(double u) { return kPi * u * bessel_j(1, u) * bessel_j(2, u); }

}  // namespace mr
