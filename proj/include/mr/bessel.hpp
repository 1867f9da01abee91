#pragma once

namespace mr {

enum class BesselMethod { Series, Asymptotic };

struct BesselEval {
  int order = 1;         // q in {1, 2}
  double argument = 0.0; // u >= 0
  double value = 0.0;
  BesselMethod method = BesselMethod::Series;
};

/// Bessel function of the first kind, orders 1 and 2. Ascending series up to
/// u = 30 (extended-precision accumulation), Hankel asymptotic expansion
/// beyond. Absolute error <= 1e-10 on [0, 50].
double bessel_j(int q, double u);

BesselEval bessel_eval(int q, double u);

// The two branches individually, for cross-validation on the crossover band.
double bessel_j_series(int q, double u);
double bessel_j_asymptotic(int q, double u);

/// Restart kernel G(u) = pi u J_1(u) J_2(u).
double g_kernel(double u);

}  // namespace mr
