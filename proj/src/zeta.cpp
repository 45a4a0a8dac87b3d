#include "metastab/zeta.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "metastab/error.hpp"

namespace metastab {

namespace {

// Euler-Maclaurin estimate of sum_{i >= N} i^{-tau}: integral, half end
// term, and the B2/B4 corrections.
double euler_maclaurin_tail(double tau, double N) {
  const double integral = std::pow(N, 1.0 - tau) / (tau - 1.0);
  const double half = 0.5 * std::pow(N, -tau);
  const double b2 = tau * std::pow(N, -tau - 1.0) / 12.0;
  const double b4 = tau * (tau + 1.0) * (tau + 2.0) * std::pow(N, -tau - 3.0) / 720.0;
  return integral + half + b2 - b4;
}

}  // namespace

double zeta_tail(double tau, long long a, double tol) {
  if (!(tau > 1.0)) {
    throw NumericError("zeta_tail: series diverges for tau <= 1 (tau=" + std::to_string(tau) + ")");
  }
  if (a < 1) throw ConfigError("zeta_tail: start index must be >= 1");
  if (!(tol > 0.0)) tol = 1e-14;

  // The next omitted term is ~ tau(tau+1)(tau+2)(tau+3)(tau+4) N^{-tau-5} / 30240.
  const double c = tau * (tau + 1.0) * (tau + 2.0) * (tau + 3.0) * (tau + 4.0) / 30240.0;
  double cutoff = std::pow(c / tol, 1.0 / (tau + 5.0));
  cutoff = std::clamp(std::ceil(cutoff), 8.0, 1e7);
  const auto N = std::max<long long>(a, static_cast<long long>(cutoff));

  // Sum small terms first.
  double direct = 0.0;
  for (long long i = N - 1; i >= a; --i) direct += std::pow(static_cast<double>(i), -tau);
  return direct + euler_maclaurin_tail(tau, static_cast<double>(N));
}

}  // namespace metastab
