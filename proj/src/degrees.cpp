#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "metastab/error.hpp"
#include "metastab/graph.hpp"
#include "metastab/zeta.hpp"

namespace metastab {

DegreeDistribution DegreeDistribution::dirac(int r) {
  DegreeDistribution d;
  d.kind = Kind::dirac;
  d.r = r;
  return d;
}

DegreeDistribution DegreeDistribution::power_law(double tau, int shift) {
  DegreeDistribution d;
  d.kind = Kind::power_law;
  d.tau = tau;
  d.shift = shift;
  return d;
}

DegreeDistribution DegreeDistribution::parse(const std::string& text) {
  std::istringstream in(text);
  std::string kind;
  in >> kind;
  if (kind == "dirac") {
    int r = 0;
    if (!(in >> r)) throw ConfigError("degree distribution: expected 'dirac <r>'");
    return dirac(r);
  }
  if (kind == "powerlaw" || kind == "power_law") {
    double tau = 0;
    int shift = 0;
    if (!(in >> tau >> shift)) throw ConfigError("degree distribution: expected 'powerlaw <tau> <shift>'");
    return power_law(tau, shift);
  }
  throw ConfigError("degree distribution: unknown kind '" + kind + "'");
}

std::string DegreeDistribution::to_string() const {
  std::ostringstream out;
  if (kind == Kind::dirac) {
    out << "dirac " << r;
  } else {
    out << "powerlaw " << tau << ' ' << shift;
  }
  return out.str();
}

double DegreeDistribution::pmf(int degree) const {
  if (kind == Kind::dirac) return degree == r ? 1.0 : 0.0;
  if (degree < shift) return 0.0;
  return std::pow(static_cast<double>(degree), -tau) / zeta_tail(tau, shift);
}

double DegreeDistribution::mean() const {
  if (kind == Kind::dirac) return r;
  if (!(tau > 2.0)) return std::numeric_limits<double>::infinity();
  return zeta_tail(tau - 1.0, shift) / zeta_tail(tau, shift);
}

DegreeSequence::DegreeSequence(std::vector<int> degrees) : degrees_(std::move(degrees)) {
  std::sort(degrees_.begin(), degrees_.end());
  prefix_.assign(degrees_.size() + 1, 0);
  for (std::size_t i = 0; i < degrees_.size(); ++i) {
    if (degrees_[i] < 1) throw ConfigError("degree sequence: degrees must be >= 1");
    prefix_[i + 1] = prefix_[i] + degrees_[i];
  }
  if (prefix_.back() % 2 != 0) throw ConfigError("degree sequence: total degree must be even");
}

double DegreeSequence::d_ave() const {
  return degrees_.empty() ? 0.0 : static_cast<double>(total()) / static_cast<double>(size());
}

namespace {

constexpr int kParityAttempts = 1000;

// Exact draw from P[d = j] proportional to j^{-tau}, j >= shift >= 2: propose
// Z with density proportional to z^{-tau} on [shift - 1, inf), round up, and
// accept with probability j^{-tau} / integral_{j-1}^{j} z^{-tau} dz <= 1.
int draw_power_law(double tau, int shift, Rng& rng) {
  const double base = shift - 1.0;
  for (;;) {
    const double z = base * std::pow(rng.uniform_open_left(), -1.0 / (tau - 1.0));
    if (!(z < 1e12)) continue;
    const double j = std::max(std::ceil(z), static_cast<double>(shift));
    const double mass = (std::pow(j - 1.0, 1.0 - tau) - std::pow(j, 1.0 - tau)) / (tau - 1.0);
    if (rng.uniform() * mass <= std::pow(j, -tau)) return static_cast<int>(j);
  }
}

}  // namespace

DegreeSequence sample_degrees(const DegreeDistribution& dist, std::size_t n, Rng& rng) {
  if (n < 1) throw ConfigError("sample_degrees: n must be >= 1");
  if (dist.kind == DegreeDistribution::Kind::dirac) {
    if (dist.r < 3) throw ConfigError("sample_degrees: dirac degree must be >= 3");
    if (dist.r % 2 == 1 && n % 2 == 1) {
      throw ConfigError("sample_degrees: parity impossible, dirac " + std::to_string(dist.r) +
                        " with odd n=" + std::to_string(n) + " always has an odd total");
    }
    return DegreeSequence(std::vector<int>(n, dist.r));
  }
  if (!(dist.tau > 2.0)) throw ConfigError("sample_degrees: power law needs tau > 2");
  if (dist.shift < 3) throw ConfigError("sample_degrees: power law needs shift >= 3");

  std::vector<int> draws(n);
  for (int attempt = 0; attempt < kParityAttempts; ++attempt) {
    long long total = 0;
    for (auto& d : draws) {
      d = draw_power_law(dist.tau, dist.shift, rng);
      total += d;
    }
    if (total % 2 == 0) return DegreeSequence(draws);
  }
  throw NumericError("sample_degrees: no even total within 1000 attempts");
}

}  // namespace metastab
