#include "metastab/landscape.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "metastab/error.hpp"

namespace metastab {

namespace {

constexpr std::uint32_t kNone = 0xffffffffU;

// Union-find with union by size and path halving.
class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1) {
    for (std::size_t i = 0; i < n; ++i) parent_[i] = static_cast<std::uint32_t>(i);
  }

  std::uint32_t find(std::uint32_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  // Returns the surviving root.
  std::uint32_t unite(std::uint32_t a, std::uint32_t b) {
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    return a;
  }

 private:
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint32_t> size_;
};

// Singly linked member lists kept per root.
struct MemberLists {
  explicit MemberLists(std::size_t n) : head(n, kNone), tail(n, kNone), next(n, kNone) {}

  void make(std::uint32_t x) {
    head[x] = tail[x] = x;
    next[x] = kNone;
  }
  void clear(std::uint32_t root) { head[root] = tail[root] = kNone; }
  // Appends the list of `from` to the list of `to` and clears `from`.
  void splice(std::uint32_t to, std::uint32_t from) {
    if (head[from] == kNone) return;
    if (head[to] == kNone) {
      head[to] = head[from];
      tail[to] = tail[from];
    } else {
      next[tail[to]] = head[from];
      tail[to] = tail[from];
    }
    clear(from);
  }
  template <typename F>
  void for_each(std::uint32_t root, F&& f) const {
    for (std::uint32_t x = head[root]; x != kNone; x = next[x]) f(x);
  }

  std::vector<std::uint32_t> head;
  std::vector<std::uint32_t> tail;
  std::vector<std::uint32_t> next;
};

void check_cap(std::size_t n, std::size_t cap, bool override_cap, const char* what) {
  if (n <= cap) return;
  if (!override_cap) {
    throw CapacityError(std::string(what) + ": n=" + std::to_string(n) + " exceeds the cap of " +
                        std::to_string(cap) + " vertices");
  }
  std::cerr << "warning: " << what << " above the cap (n=" << n << "), memory ~ 2^n words\n";
}

}  // namespace

EnergyLandscape::EnergyLandscape(const MultiGraph& g, const ModelParams& params, LandscapeOptions options,
                                 std::size_t cap)
    : n_(g.n()), params_(params), options_(options) {
  params.validate(options.allow_zero_field);
  if (n_ < 1) throw ConfigError("landscape: empty graph");
  if (n_ > 31) throw CapacityError("landscape: n above 31 cannot be enumerated");
  check_cap(n_, cap, options.override_cap, "landscape");

  const std::size_t count = std::size_t{1} << n_;
  boundary_.assign(count, 0);
  energy_.resize(count);

  // Gray-code walk: consecutive codes differ in one vertex.
  std::uint32_t config = 0;
  for (std::size_t i = 1; i < count; ++i) {
    const auto v = static_cast<Vertex>(std::countr_zero(i));
    const bool up = (config >> v) & 1U;
    int same = 0;
    int other = 0;
    for (Vertex w : g.neighbors(v)) (((config >> w) & 1U) == up ? same : other)++;
    const std::int32_t b = boundary_[config];
    config ^= std::uint32_t{1} << v;
    boundary_[config] = b + same - other;
  }

  const double e_minus = -0.5 * params.J * static_cast<double>(g.edge_count()) + 0.5 * params.h * static_cast<double>(n_);
  for (std::size_t c = 0; c < count; ++c) {
    energy_[c] = e_minus + params.J * boundary_[c] - params.h * std::popcount(c);
  }

  order_.resize(count);
  for (std::size_t c = 0; c < count; ++c) order_[c] = static_cast<std::uint32_t>(c);
  std::sort(order_.begin(), order_.end(), [&](std::uint32_t a, std::uint32_t b) {
    return energy_[a] < energy_[b] || (energy_[a] == energy_[b] && a < b);
  });
}

std::vector<std::uint32_t> EnergyLandscape::ranks() const {
  std::vector<std::uint32_t> rank(size());
  for (std::size_t i = 0; i < order_.size(); ++i) rank[order_[i]] = static_cast<std::uint32_t>(i);
  return rank;
}

double communication_height(const EnergyLandscape& land, const std::vector<std::uint32_t>& a,
                            const std::vector<std::uint32_t>& b) {
  if (a.empty() || b.empty()) throw ConfigError("communication_height: empty set");
  std::vector<std::uint8_t> flag(land.size(), 0);
  for (auto x : a) flag.at(x) |= 1;
  for (auto x : b) {
    if (flag.at(x) & 1) throw ConfigError("communication_height: sets must be disjoint");
    flag[x] |= 2;
  }
  DisjointSets sets(land.size());
  std::vector<char> inserted(land.size(), 0);
  const std::size_t n = land.n();
  for (std::uint32_t c : land.order()) {
    inserted[c] = 1;
    std::uint32_t root = c;
    for (std::size_t v = 0; v < n; ++v) {
      const std::uint32_t nb = c ^ (std::uint32_t{1} << v);
      if (!inserted[nb]) continue;
      const std::uint32_t other = sets.find(nb);
      if (other == root) continue;
      const std::uint8_t merged = flag[root] | flag[other];
      root = sets.unite(root, other);
      flag[root] = merged;
    }
    if (flag[root] == 3) return land.energy(c);
  }
  throw NumericError("communication_height: sets never merged");
}

std::vector<double> heights_to(const EnergyLandscape& land, std::uint32_t target) {
  const std::size_t size = land.size();
  std::vector<double> phi(size, std::numeric_limits<double>::quiet_NaN());
  DisjointSets sets(size);
  MemberLists lists(size);
  std::vector<char> inserted(size, 0);
  std::vector<char> flagged(size, 0);
  const std::size_t n = land.n();

  for (std::uint32_t c : land.order()) {
    const double level = land.energy(c);
    inserted[c] = 1;
    std::uint32_t root = c;
    if (c == target) {
      flagged[c] = 1;
      phi[c] = level;
    } else {
      lists.make(c);
    }
    for (std::size_t v = 0; v < n; ++v) {
      const std::uint32_t nb = c ^ (std::uint32_t{1} << v);
      if (!inserted[nb]) continue;
      const std::uint32_t other = sets.find(nb);
      if (other == root) continue;
      const bool f_root = flagged[root];
      const bool f_other = flagged[other];
      if (f_root != f_other) {
        lists.for_each(f_root ? other : root, [&](std::uint32_t x) { phi[x] = level; });
        lists.clear(root);
        lists.clear(other);
      }
      const std::uint32_t kept = sets.unite(root, other);
      const std::uint32_t gone = kept == root ? other : root;
      lists.splice(kept, gone);
      flagged[kept] = f_root || f_other;
      root = kept;
    }
  }
  return phi;
}

std::vector<double> stability_levels(const EnergyLandscape& land) {
  const std::size_t size = land.size();
  std::vector<double> v_table(size, std::numeric_limits<double>::infinity());
  DisjointSets sets(size);
  MemberLists unresolved(size);
  std::vector<double> floor(size, 0.0);
  std::vector<char> inserted(size, 0);
  const std::size_t n = land.n();

  // Unresolved members of a component all sit at its minimum energy; they
  // resolve when the component meets one with a strictly lower minimum.
  for (std::uint32_t c : land.order()) {
    const double level = land.energy(c);
    inserted[c] = 1;
    unresolved.make(c);
    floor[c] = level;
    std::uint32_t root = c;
    for (std::size_t v = 0; v < n; ++v) {
      const std::uint32_t nb = c ^ (std::uint32_t{1} << v);
      if (!inserted[nb]) continue;
      const std::uint32_t other = sets.find(nb);
      if (other == root) continue;
      const double lo = std::min(floor[root], floor[other]);
      for (std::uint32_t side : {root, other}) {
        if (floor[side] > lo + kEnergyTol) {
          unresolved.for_each(side, [&](std::uint32_t x) { v_table[x] = level - land.energy(x); });
          unresolved.clear(side);
        }
      }
      const std::uint32_t kept = sets.unite(root, other);
      unresolved.splice(kept, kept == root ? other : root);
      floor[kept] = lo;
      root = kept;
    }
  }
  return v_table;
}

double energy_barrier(const EnergyLandscape& land) {
  return communication_height(land, {land.minus()}, {land.plus()}) - land.energy(land.minus());
}

LandscapeReport classify_states(const EnergyLandscape& land) {
  if (!(land.params().h > 0.0)) {
    throw ConfigError("classify_states: requires h > 0 (at h = 0 both uniform states are stable)");
  }
  LandscapeReport report;
  report.n = land.n();
  report.energy_minus = land.energy(land.minus());
  report.energy_plus = land.energy(land.plus());
  report.gamma_star = energy_barrier(land);
  report.v_table = stability_levels(land);
  report.v_minus = report.v_table[land.minus()];

  const double ground = land.energy(land.order().front());
  double best = -std::numeric_limits<double>::infinity();
  for (std::uint32_t c = 0; c < land.size(); ++c) {
    if (land.energy(c) <= ground + kEnergyTol) {
      report.omega_stab.push_back(c);
    } else {
      best = std::max(best, report.v_table[c]);
    }
  }
  for (std::uint32_t c = 0; c < land.size(); ++c) {
    if (land.energy(c) > ground + kEnergyTol && report.v_table[c] >= best - kEnergyTol) {
      report.omega_meta.push_back(c);
    }
  }
  report.v_meta = best;
  report.h_holds = report.omega_meta.size() == 1 && report.omega_meta.front() == land.minus();
  return report;
}

std::string config_hex(std::uint32_t config) {
  std::ostringstream out;
  out << std::hex << config;
  return out.str();
}

namespace {

void write_set(std::ostream& out, const char* key, const std::vector<std::uint32_t>& set, std::size_t limit = 64) {
  out << key << ": ";
  for (std::size_t i = 0; i < set.size() && i < limit; ++i) out << (i ? " " : "") << config_hex(set[i]);
  if (set.size() > limit) out << " ...";
  out << '\n';
}

}  // namespace

void write_landscape_report(std::ostream& out, const LandscapeReport& report) {
  out << std::setprecision(12);
  out << "n: " << report.n << '\n';
  out << "gamma_star: " << report.gamma_star << '\n';
  out << "energy_minus: " << report.energy_minus << '\n';
  out << "energy_plus: " << report.energy_plus << '\n';
  out << "v_minus: " << report.v_minus << '\n';
  out << "v_meta: " << report.v_meta << '\n';
  out << "omega_stab_size: " << report.omega_stab.size() << '\n';
  write_set(out, "omega_stab", report.omega_stab);
  out << "omega_meta_size: " << report.omega_meta.size() << '\n';
  write_set(out, "omega_meta", report.omega_meta);
  out << "h_holds: " << (report.h_holds ? "true" : "false") << '\n';
}

void write_gate_report(std::ostream& out, const GateReport& report) {
  out << std::setprecision(12);
  out << "level: " << report.level << '\n';
  out << "valley_size: " << report.valley_size << '\n';
  out << "p_star_size: " << report.p_star.size() << '\n';
  write_set(out, "p_star", report.p_star);
  out << "c_star_size: " << report.c_star.size() << '\n';
  write_set(out, "c_star", report.c_star);
  out << "below_level_extensions: " << report.below_level_extensions.size() << '\n';
  out << "structural_error: " << (report.structural_error ? "true" : "false") << '\n';
  if (!report.note.empty()) out << "note: " << report.note << '\n';
}

void write_v_table(std::ostream& out, const EnergyLandscape& land, const std::vector<double>& v) {
  out << std::setprecision(12);
  out << "config_hex,energy,V\n";
  for (std::uint32_t c = 0; c < land.size(); ++c) {
    out << config_hex(c) << ',' << land.energy(c) << ',';
    if (std::isinf(v[c])) {
      out << "inf";
    } else {
      out << v[c];
    }
    out << '\n';
  }
}

}  // namespace metastab
