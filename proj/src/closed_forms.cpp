#include <cmath>
#include <limits>

#include "metastab/bounds.hpp"
#include "metastab/error.hpp"

namespace metastab {

namespace {

bool is_integer(double x) { return std::abs(x - std::round(x)) < 1e-9 * std::max(1.0, std::abs(x)); }

double binomial(std::size_t n, std::size_t k) {
  double c = 1.0;
  for (std::size_t i = 1; i <= k; ++i) c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
  return c;
}

void check_model(double J, double h) {
  if (!(J > 0.0) || !(h > 0.0)) throw ConfigError("closed form: need J > 0 and h > 0");
}

}  // namespace

ClosedForm torus_reference(std::size_t L, double J, double h) {
  check_model(J, h);
  if (is_integer(2.0 * J / h)) throw ConfigError("torus: 2J/h must not be an integer");
  const double lc = std::ceil(2.0 * J / h);
  if (!(lc > 1.0)) throw ConfigError("torus: no metastability for 2J/h < 1");
  ClosedForm out;
  out.gamma = J * 4.0 * lc - h * (lc * (lc - 1.0) + 1.0);
  out.prefactor = 1.0 / (static_cast<double>(L * L) * (4.0 / 3.0) * (2.0 * lc - 1.0));
  if (static_cast<double>(L) < lc + 1.0) {
    out.precondition_ok = false;
    out.note = "torus smaller than the critical droplet";
  }
  return out;
}

ClosedForm hypercube_reference(std::size_t n, double J, double h) {
  check_model(J, h);
  if (n < 1 || n > 60) throw ConfigError("hypercube: dimension must lie in [1, 60]");
  const double r = h / J;
  const double up = std::ceil(r);
  const double eps = std::fmod(std::ceil(static_cast<double>(n) - h), 2.0);
  ClosedForm out;
  out.gamma = (1.0 / 3.0) * (1.0 - r + up) * (std::pow(2.0, std::ceil(static_cast<double>(n) - r)) - 4.0 + 2.0 * eps) - eps;
  out.prefactor = std::tgamma(up + 1.0) / (std::tgamma(static_cast<double>(n) + 1.0) * std::pow(2.0, static_cast<double>(n) - 4.0) * (3.0 - eps));

  // h/J = a/b with b <= 2^n is excluded.
  const std::size_t limit = n >= 24 ? (std::size_t{1} << 24) : (std::size_t{1} << n);
  for (std::size_t b = 1; b <= limit; ++b) {
    if (is_integer(r * static_cast<double>(b)) && std::round(r * static_cast<double>(b)) >= 1.0) {
      out.precondition_ok = false;
      out.note = "h/J = " + std::to_string(static_cast<long long>(std::round(r * static_cast<double>(b)))) + "/" +
                 std::to_string(b) + " lies in the excluded rational set";
      break;
    }
  }
  return out;
}

std::size_t complete_critical_size(std::size_t n, double J, double h) {
  const double v = std::ceil(0.5 * (static_cast<double>(n) - 1.0 - h / J));
  return v > 0.0 ? static_cast<std::size_t>(v) : 0;
}

ClosedForm complete_reference(std::size_t n, double J, double h) {
  check_model(J, h);
  if (is_integer(h / J)) throw ConfigError("complete graph: h/J must not be an integer");
  const std::size_t ns = complete_critical_size(n, J, h);
  ClosedForm out;
  out.gamma = static_cast<double>(ns) * (J * static_cast<double>(n - ns) - h);
  out.prefactor = 1.0 / binomial(n, ns) * static_cast<double>(n) / static_cast<double>(n - ns);
  if (ns == 0) {
    out.precondition_ok = false;
    out.note = "no metastability: n* = 0";
  }
  return out;
}

double complete_chain_prefactor(std::size_t n, double J, double h) {
  const std::size_t ns = complete_critical_size(n, J, h);
  if (ns == 0) return std::numeric_limits<double>::quiet_NaN();
  return 1.0 / binomial(n, ns) * static_cast<double>(n) / (static_cast<double>(ns) * static_cast<double>(n - ns));
}

ClosedForm complete_scaled_reference(std::size_t n, double J_prime, double h) {
  check_model(J_prime, h);
  const double nn = static_cast<double>(n);
  const double raw = std::ceil(0.5 * nn * (1.0 - h / J_prime) - 0.5);
  const std::size_t ns = raw > 0.0 ? static_cast<std::size_t>(raw) : 0;
  ClosedForm out;
  // J = J'/n in n*(J(n - n*) - h).
  out.gamma = static_cast<double>(ns) * (J_prime * (nn - static_cast<double>(ns)) / nn - h);
  out.prefactor = ns == 0 ? std::numeric_limits<double>::quiet_NaN()
                          : 1.0 / binomial(n, ns) * nn / (nn - static_cast<double>(ns));
  out.precondition_ok = h / J_prime < 1.0 - 1.0 / nn;
  if (!out.precondition_ok) out.note = "no metastability: h/J' >= 1 - 1/n";
  return out;
}

double er_leading_order(std::size_t n, double J, double f) { return 0.25 * J * static_cast<double>(n) * f; }

ClosedForm closed_form_reference(const ReferenceGraph& family, double J, double h) {
  switch (family.family) {
    case ReferenceGraph::Family::complete: return complete_reference(family.size, J, h);
    case ReferenceGraph::Family::torus: return torus_reference(family.size, J, h);
    case ReferenceGraph::Family::hypercube: return hypercube_reference(family.size, J, h);
  }
  throw ConfigError("closed form: unknown family");
}

}  // namespace metastab
