#include "metastab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "metastab/error.hpp"

namespace metastab {

namespace {

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

constexpr std::size_t kScanPoints = 10000;

}  // namespace

double i_delta_exponent(double delta, double x, double y) {
  const double entropy = (1.0 - 1.0 / delta) * (xlogx(x) + xlogx(1.0 - x));
  return entropy - 0.5 * xlogx(1.0 - x - y) - 0.5 * xlogx(x - y) - xlogx(y);
}

IDelta i_delta_full(double delta, double x, double tol) {
  if (!(delta > 1.0)) throw ConfigError("i_delta: delta must exceed 1");
  if (!(x > 0.0 && x <= 0.5 + 1e-15)) throw ConfigError("i_delta: x must lie in (0, 1/2]");
  x = std::min(x, 0.5);
  if (!(tol > 0.0)) tol = 1e-12;

  double lo = 0.0;
  for (std::size_t i = 1; i <= kScanPoints; ++i) {
    const double y = x * static_cast<double>(i) / static_cast<double>(kScanPoints);
    if (i_delta_exponent(delta, x, y) > 0.0) {
      double hi = y;
      while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (i_delta_exponent(delta, x, mid) > 0.0 ? hi : lo) = mid;
      }
      return {0.5 * (lo + hi), false};
    }
    lo = y;
  }
  return {x, true};
}

double i_delta(double delta, double x, double tol) { return i_delta_full(delta, x, tol).value; }

UpperBound gamma_upper(const DegreeSequence& degrees, double J, double h, double slack_constant) {
  if (!(J > 0.0) || !(h >= 0.0)) throw ConfigError("gamma_upper: need J > 0 and h >= 0");
  const std::size_t n = degrees.size();
  if (n < 2) throw ConfigError("gamma_upper: need at least two vertices");
  const double ell_n = static_cast<double>(degrees.total());
  const auto g = [&](std::size_t m) {
    const double l = static_cast<double>(degrees.ell(m));
    return l * (1.0 - l / ell_n);
  };
  const double ratio = h / J;

  UpperBound out;
  out.slack_constant = slack_constant;
  out.slack = slack_constant * std::pow(ell_n, 0.75);

  std::size_t m_bar = 0;
  for (std::size_t m = 1; m < n; ++m) {
    if (g(m) >= g(m + 1) - ratio) {
      m_bar = m;
      break;
    }
  }
  if (m_bar == 0) {
    throw NumericError("gamma_upper: no m_bar (h/J=" + std::to_string(ratio) + ", n=" + std::to_string(n) + ")");
  }
  out.m_bar = m_bar;
  out.ell_mbar = degrees.ell(m_bar);
  out.gamma_plus = J * g(m_bar) - h * static_cast<double>(m_bar);

  for (std::size_t m = 1; m < n; ++m) {
    const double d_next = degrees[m];
    if (d_next * (1.0 - 2.0 * static_cast<double>(degrees.ell(m)) / ell_n) <= ratio) {
      out.m_bar_equivalent = m;
      break;
    }
  }
  if (2 * m_bar >= n) out.warning = "m_bar=" + std::to_string(m_bar) + " is not below n/2";
  if (out.m_bar_equivalent != m_bar) {
    // The two tests differ by d_{m+1}^2 / ell_n at every index.
    out.warning += (out.warning.empty() ? "" : "; ") + std::string("equivalent condition gives m=") +
                   std::to_string(out.m_bar_equivalent) + " (difference d^2/ell_n)";
  }

  out.regular_closed_form = std::numeric_limits<double>::quiet_NaN();
  if (degrees.d_min() == degrees.d_max()) {
    const double r = degrees.d_min();
    out.regular_closed_form = J * r / 4.0 * static_cast<double>(n) * (1.0 - std::pow(h / (J * r), 2));
  }
  return out;
}

LowerBound gamma_lower(const DegreeSequence& degrees, double J, double h) {
  if (!(J > 0.0) || !(h >= 0.0)) throw ConfigError("gamma_lower: need J > 0 and h >= 0");
  if (degrees.size() == 0) throw ConfigError("gamma_lower: empty degree sequence");
  const long long ell_n = degrees.total();
  LowerBound out;
  for (std::size_t m = 0; m <= degrees.size(); ++m) {
    if (2 * degrees.ell(m) >= ell_n) {
      out.m_tilde = m;
      break;
    }
  }
  const double d_ave = degrees.d_ave();
  const IDelta i = i_delta_full(d_ave, 0.5);
  out.i_half = i.value;
  out.saturated = i.saturated;
  out.gamma_minus = J * d_ave * i.value * static_cast<double>(degrees.size()) - h * static_cast<double>(out.m_tilde);
  return out;
}

double h_condition_strict_rhs(double d_min, double d_ave) {
  const double i_ave = i_delta(d_ave, 0.5);
  const double i_min = i_delta(d_min, 0.5);
  return 2.0 * i_ave - 0.5 * std::pow(1.0 - 4.0 * i_min, 2) / (1.0 - 2.0 * i_min);
}

bool h_condition_strict(double d_min, double d_ave, double J, double h) {
  if (!(d_min >= 3.0)) throw ConfigError("h_condition_strict: d_min must be >= 3");
  return (h / J) * (1.0 / d_ave + 0.5) < h_condition_strict_rhs(d_min, d_ave);
}

WeakCondition h_condition_weak(const DegreeSequence& degrees, double J, double h, std::size_t grid) {
  const UpperBound upper = gamma_upper(degrees, J, h);
  const double ell_n = static_cast<double>(degrees.total());
  const double frac = static_cast<double>(upper.ell_mbar) / ell_n;
  const double delta = degrees.d_min();

  WeakCondition out;
  out.worst_margin = std::numeric_limits<double>::infinity();
  std::size_t size_max = 0;
  for (std::size_t i = 1; i <= grid; ++i) {
    const double x = 0.5 * static_cast<double>(i) / static_cast<double>(grid);
    while (size_max < degrees.size() && static_cast<double>(degrees.ell(size_max + 1)) <= x * ell_n) ++size_max;
    const double I = i_delta(delta, x);
    const double c = (x - 2.0 * I) / (x - I);
    const double lhs = h / (J * ell_n) * (static_cast<double>(upper.m_bar) + static_cast<double>(size_max) * (2.0 - c));
    const double rhs = 2.0 * frac * (1.0 - frac) - (x - 2.0 * I) * (x - 2.0 * I) / (x - I);
    if (rhs - lhs < out.worst_margin) {
      out.worst_margin = rhs - lhs;
      out.worst_x = x;
    }
  }
  out.holds = out.worst_margin >= 0.0;
  return out;
}

}  // namespace metastab
