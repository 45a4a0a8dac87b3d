#include <algorithm>
#include <cmath>

#include <limits>

#include "metastab/bounds.hpp"
#include "metastab/error.hpp"
#include "metastab/zeta.hpp"

namespace metastab {

namespace {

constexpr int kScanLimit = 1000000;

}  // namespace

PowerLawQuantities power_law_quantities(double tau, int delta, double J, double h) {
  if (!(tau > 2.0)) throw ConfigError("power_law_quantities: tau must exceed 2");
  if (delta < 3) throw ConfigError("power_law_quantities: delta must be >= 3");
  if (!(J > 0.0) || !(h >= 0.0)) throw ConfigError("power_law_quantities: need J > 0 and h >= 0");
  const double ratio = h / J;
  const double z_tau = zeta_tail(tau, delta);
  const double z_deg = zeta_tail(tau - 1.0, delta);

  PowerLawQuantities q;
  q.tau = tau;
  q.delta = delta;
  q.d_ave = z_deg / z_tau;

  // Degree fraction held by degrees below delta + k, and the degree and vertex
  // fractions of the group delta + k.
  const auto F = [&](int k) { return 1.0 - zeta_tail(tau - 1.0, delta + k) / z_deg; };
  const auto vertices_below = [&](int k) { return 1.0 - zeta_tail(tau, delta + k) / z_tau; };
  const auto w = [&](int k) { return std::pow(delta + k, 1.0 - tau) / z_deg; };
  const auto v = [&](int k) { return std::pow(delta + k, -tau) / z_tau; };

  // The right side grows with k, so the printed set is empty or starts at 1.
  q.kappa = ratio >= delta * F(1) ? 0 : -1;

  q.kappa_group = -1;
  for (int k = 0; k <= kScanLimit; ++k) {
    if (ratio >= (delta + k) * (1.0 - 2.0 * F(k + 1))) {
      q.kappa_group = k;
      break;
    }
  }
  if (q.kappa_group < 0) throw NumericError("power_law_quantities: group scan did not terminate");
  {
    const int k = q.kappa_group;
    const double target = 0.5 * (1.0 - ratio / (delta + k));
    q.y = std::clamp((target - F(k)) / w(k), 0.0, 1.0);
    q.ell_frac = F(k) + q.y * w(k);
    q.m_bar_frac = vertices_below(k) + q.y * v(k);
  }

  int half_group = -1;
  for (int k = 0; k <= kScanLimit; ++k) {
    if (F(k + 1) >= 0.5) {
      half_group = k;
      break;
    }
  }
  if (half_group < 0) throw NumericError("power_law_quantities: half-degree scan did not terminate");
  q.m_tilde_frac = vertices_below(half_group) + (0.5 - F(half_group)) / w(half_group) * v(half_group);
  q.kappa_tilde = half_group;
  q.m_tilde_frac_group = vertices_below(half_group + 1);

  // As printed; undefined when the threshold set is empty.
  q.m_bar_frac_literal = q.ell_frac_literal = q.m_tilde_frac_literal = std::numeric_limits<double>::quiet_NaN();
  if (q.kappa >= 0) {
    const int k = q.kappa;
    const double A = zeta_tail(tau - 1.0, delta + k) / z_deg;
    const double B = z_tau / z_deg;
    double y = 1.0;
    if (k == 0) {
      y = ratio >= delta * (1.0 - A) ? 0.0 : 1.0;
    } else {
      y = std::clamp((1.0 - ratio / (delta + k) - A) / (k * B), 0.0, 1.0);
    }
    q.m_bar_frac_literal = vertices_below(k) + y;
    q.ell_frac_literal = A + y * k * B;

    int kt = -1;
    for (int m = 1; m <= kScanLimit; ++m) {
      if ((z_deg + zeta_tail(tau - 1.0, delta + m + 1)) / z_tau >= 0.5 * q.d_ave) {
        kt = m;
        break;
      }
    }
    double sum = 0.0;
    for (int i = 0; i <= kt; ++i) sum += std::pow(delta + i, tau);
    q.m_tilde_frac_literal = sum / z_tau;
  }
  return q;
}

}  // namespace metastab
