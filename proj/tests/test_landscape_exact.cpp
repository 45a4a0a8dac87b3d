#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "metastab/energy.hpp"
#include "metastab/error.hpp"
#include "metastab/landscape.hpp"
#include "support/oracles.hpp"

using namespace metastab;

namespace {

MultiGraph complete(std::size_t n) { return build_reference_graph({ReferenceGraph::Family::complete, n}); }

MultiGraph random_multigraph(std::size_t n, std::size_t edges, Rng& rng) {
  MultiGraph g(n);
  for (std::size_t e = 0; e < edges; ++e) {
    g.add_edge(static_cast<Vertex>(rng.below(n)), static_cast<Vertex>(rng.below(n)));
  }
  return g;
}

std::vector<std::uint32_t> configs_with(std::size_t n, int plus) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t c = 0; c < (1U << n); ++c) {
    if (std::popcount(c) == plus) out.push_back(c);
  }
  return out;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TEST_SUITE("landscape_exact") {

TEST_CASE("energies match the direct sum") {
  Rng rng(3);
  const auto g = random_multigraph(7, 12, rng);
  const EnergyLandscape land(g, {1.3, 0.4, 1.0});
  const auto direct = oracle::all_energies(g, 1.3, 0.4);
  for (std::uint32_t c = 0; c < land.size(); ++c) REQUIRE(land.energy(c) == doctest::Approx(direct[c]).epsilon(1e-12));
}

TEST_CASE("communication height: adjacent pair and downhill graph") {
  const auto k3 = complete(3);
  const EnergyLandscape land(k3, {1.0, 0.5, 1.0});
  CHECK(communication_height(land, {0}, {1}) == doctest::Approx(std::max(land.energy(0), land.energy(1))));

  const EnergyLandscape flat(MultiGraph(2), {1.0, 1.0, 1.0});
  CHECK(communication_height(flat, {flat.minus()}, {flat.plus()}) == doctest::Approx(flat.energy(flat.minus())));
}

TEST_CASE("communication height matches the exhaustive search and is symmetric") {
  Rng rng(17);
  for (int rep = 0; rep < 60; ++rep) {
    const std::size_t n = 2 + rng.below(6);
    const auto g = random_multigraph(n, rng.below(3 * n), rng);
    const ModelParams p{1.0, 0.1 + rng.uniform(), 1.0};
    const EnergyLandscape land(g, p);
    const auto energy = oracle::all_energies(g, p.J, p.h);
    std::vector<std::uint32_t> a{static_cast<std::uint32_t>(rng.below(land.size()))};
    std::vector<std::uint32_t> b;
    while (b.size() < 2) {
      const auto c = static_cast<std::uint32_t>(rng.below(land.size()));
      if (c != a[0] && (b.empty() || c != b[0])) b.push_back(c);
    }
    const double got = communication_height(land, a, b);
    REQUIRE(got == doctest::Approx(oracle::communication_height(energy, n, a, b)));
    REQUIRE(communication_height(land, b, a) == doctest::Approx(got));
    const auto to_plus = heights_to(land, land.plus());
    const auto brute = oracle::minimax_from(energy, n, {land.plus()});
    for (std::uint32_t c = 0; c < land.size(); ++c) REQUIRE(to_plus[c] == doctest::Approx(brute[c]));
  }
}

TEST_CASE("barrier on complete graphs") {
  CHECK(energy_barrier(EnergyLandscape(complete(4), {1.0, 0.5, 1.0})) == doctest::Approx(3.0));
  CHECK(energy_barrier(EnergyLandscape(complete(6), {1.0, 0.5, 1.0})) == doctest::Approx(7.5));
  CHECK(energy_barrier(EnergyLandscape(MultiGraph(5), {1.0, 0.5, 1.0})) == doctest::Approx(0.0));
}

TEST_CASE("stability levels match the exhaustive definition") {
  Rng rng(23);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 2 + rng.below(5);
    const auto g = random_multigraph(n, rng.below(3 * n), rng);
    const ModelParams p{1.0, 0.1 + rng.uniform(), 1.0};
    const EnergyLandscape land(g, p);
    const auto got = stability_levels(land);
    const auto want = oracle::stability_levels(oracle::all_energies(g, p.J, p.h), n);
    for (std::uint32_t c = 0; c < land.size(); ++c) {
      if (std::isinf(want[c])) {
        REQUIRE(std::isinf(got[c]));
      } else {
        REQUIRE(got[c] == doctest::Approx(want[c]));
      }
    }
  }
}

TEST_CASE("stability levels on small complete graphs") {
  const EnergyLandscape k3(complete(3), {1.0, 0.5, 1.0});
  const auto v3 = stability_levels(k3);
  CHECK(v3[k3.plus()] == kInf);
  CHECK(v3[0b001] == doctest::Approx(0.0));
  const EnergyLandscape k4(complete(4), {1.0, 0.5, 1.0});
  CHECK(stability_levels(k4)[k4.minus()] == doctest::Approx(3.0));
}

TEST_CASE("classification on K4") {
  const auto report = classify_states(EnergyLandscape(complete(4), {1.0, 0.5, 1.0}));
  CHECK(report.gamma_star == doctest::Approx(3.0));
  CHECK(report.omega_stab == std::vector<std::uint32_t>{0xf});
  CHECK(report.omega_meta == std::vector<std::uint32_t>{0});
  CHECK(report.h_holds);
  CHECK(report.v_meta == doctest::Approx(3.0));
}

TEST_CASE("classification on an edgeless graph") {
  const std::size_t n = 4;
  const auto report = classify_states(EnergyLandscape(MultiGraph(n), {1.0, 0.5, 1.0}));
  CHECK_FALSE(report.h_holds);
  CHECK(report.omega_meta.size() == (1U << n) - 1);
  for (std::uint32_t c = 0; c + 1 < (1U << n); ++c) CHECK(report.v_table[c] == doctest::Approx(0.0));
}

TEST_CASE("zero field: two ground states and classification refuses") {
  LandscapeOptions opts;
  opts.allow_zero_field = true;
  const EnergyLandscape land(complete(4), {1.0, 0.0, 1.0}, opts);
  const auto v = stability_levels(land);
  CHECK(std::count(v.begin(), v.end(), kInf) == 2);
  CHECK_THROWS_AS(classify_states(land), ConfigError);
  CHECK_THROWS_AS(EnergyLandscape(complete(4), {1.0, 0.0, 1.0}), ConfigError);
}

TEST_CASE("vertex caps") {
  CHECK_THROWS_AS(EnergyLandscape(MultiGraph(25), {1.0, 0.5, 1.0}), CapacityError);
  const EnergyLandscape mid(MultiGraph(21), {1.0, 0.5, 1.0});
  CHECK_THROWS_AS(gate_sets(mid), CapacityError);
}

TEST_CASE("gates on K4 and K6") {
  const auto g4 = gate_sets(EnergyLandscape(complete(4), {1.0, 0.5, 1.0}));
  CHECK(g4.c_star == configs_with(4, 2));
  CHECK(g4.p_star == configs_with(4, 1));
  CHECK_FALSE(g4.structural_error);
  const auto g6 = gate_sets(EnergyLandscape(complete(6), {1.0, 0.5, 1.0}));
  CHECK(g6.c_star.size() == 20);
  CHECK(g6.c_star == configs_with(6, 3));
}

TEST_CASE("gates agree with the maximal pair from the fixpoint search") {
  Rng rng(29);
  int checked = 0;
  for (int rep = 0; rep < 80; ++rep) {
    const std::size_t n = 3 + rng.below(5);
    const auto g = random_multigraph(n, n + rng.below(2 * n), rng);
    const ModelParams p{1.0, 0.1 + 0.8 * rng.uniform(), 1.0};
    const EnergyLandscape land(g, p);
    const auto gates = gate_sets(land);
    const auto energy = oracle::all_energies(g, p.J, p.h);
    const auto pair = oracle::maximal_gate_pair(energy, n);
    REQUIRE(oracle::satisfies_gate_conditions(energy, n, pair));

    std::set<std::uint32_t> at_level;
    std::set<std::uint32_t> below;
    for (auto c : pair.c) (std::abs(energy[c] - gates.level) <= 1e-9 ? at_level : below).insert(c);
    REQUIRE(std::set<std::uint32_t>(gates.c_star.begin(), gates.c_star.end()) == at_level);
    for (auto c : gates.below_level_extensions) REQUIRE(below.count(c) == 1);
    for (auto pc : gates.p_star) REQUIRE(pair.p.count(pc) == 1);
    for (auto pc : gates.p_star) REQUIRE(energy[pc] < gates.level);

    // The reported pair itself satisfies the conditions.
    oracle::GatePair reported;
    reported.c.insert(gates.c_star.begin(), gates.c_star.end());
    reported.p.insert(gates.p_star.begin(), gates.p_star.end());
    REQUIRE(oracle::satisfies_gate_conditions(energy, n, reported));
    ++checked;
  }
  CHECK(checked == 80);
}

TEST_CASE("gate pairs are closed under union") {
  Rng rng(31);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t n = 3 + rng.below(4);
    const auto g = random_multigraph(n, n + rng.below(2 * n), rng);
    const ModelParams p{1.0, 0.1 + 0.8 * rng.uniform(), 1.0};
    const auto energy = oracle::all_energies(g, p.J, p.h);
    const auto full = oracle::maximal_gate_pair(energy, n);
    // Two sub-pairs: pick one C member each and close over its P neighbours.
    const auto sub = [&](std::uint32_t seed_c) {
      oracle::GatePair s;
      s.c.insert(seed_c);
      for (auto pc : full.p) {
        if (std::has_single_bit(pc ^ seed_c)) s.p.insert(pc);
      }
      return s;
    };
    if (full.c.size() < 2) continue;
    const auto first = sub(*full.c.begin());
    const auto second = sub(*full.c.rbegin());
    REQUIRE(oracle::satisfies_gate_conditions(energy, n, first));
    REQUIRE(oracle::satisfies_gate_conditions(energy, n, second));
    oracle::GatePair both = first;
    both.c.insert(second.c.begin(), second.c.end());
    both.p.insert(second.p.begin(), second.p.end());
    REQUIRE(oracle::satisfies_gate_conditions(energy, n, both));
  }
}

TEST_CASE("greedy removal path") {
  const auto k3 = complete(3);
  const ModelParams p{1.0, 0.5, 1.0};
  const auto one = greedy_removal_path(k3, p, SpinConfig::from_vertices(3, {1}));
  REQUIRE(one.path.size() == 2);
  CHECK(one.path.back() == SpinConfig::all_minus(3));
  CHECK(one.elevation == doctest::Approx(0.0));
  CHECK(one.end_drop > 0);
  const auto empty = greedy_removal_path(k3, p, SpinConfig::all_minus(3));
  CHECK(empty.path.size() == 1);
  CHECK(empty.elevation == 0.0);
}

TEST_CASE("greedy removal elevation bounds the stability level") {
  Rng rng(37);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 3 + rng.below(5);
    const auto g = random_multigraph(n, n + rng.below(2 * n), rng);
    const ModelParams p{1.0, 0.2 + 0.6 * rng.uniform(), 1.0};
    const EnergyLandscape land(g, p);
    const auto v = stability_levels(land);
    for (std::uint32_t c = 0; c < land.size(); ++c) {
      const auto path = greedy_removal_path(g, p, SpinConfig::from_index(n, c));
      if (path.end_drop > 1e-9) REQUIRE(path.elevation >= v[c] - 1e-9);
    }
  }
}

TEST_CASE("sorted flip path is an upper bound and optimal on K4") {
  const ModelParams p{1.0, 0.5, 1.0};
  CHECK(sorted_flip_path(complete(4), p).height == doctest::Approx(3.0));
  Rng rng(41);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t n = 4 + rng.below(7);
    const auto g = random_multigraph(n, 2 * n, rng);
    const EnergyLandscape land(g, p);
    REQUIRE(sorted_flip_path(g, p).height >= energy_barrier(land) - 1e-9);
  }
}

TEST_CASE("sorted flip path profile follows the degree-prefix formula") {
  Rng rng(14);
  const auto d = sample_degrees(DegreeDistribution::dirac(3), 14, rng);
  const auto g = build_cm_static(d, rng);
  const ModelParams p{1.0, 0.5, 1.0};
  const auto path = sorted_flip_path(g, p);
  REQUIRE(path.profile.size() == 15);
  const double ln = static_cast<double>(d.total());
  double worst = 0;
  for (std::size_t m = 0; m <= 14; ++m) {
    const double lm = static_cast<double>(d.ell(m));
    const double predicted = p.J * lm * (1.0 - lm / ln) - p.h * static_cast<double>(m);
    worst = std::max(worst, std::abs(path.profile[m] - predicted));
  }
  // Deviations scale like ell_n^{3/4}; constant 1.
  CHECK(worst <= std::pow(ln, 0.75));
  // The profile itself is exact: boundary count along the order.
  auto sigma = SpinConfig::all_minus(14);
  for (std::size_t m = 0; m < 14; ++m) {
    sigma.flip(path.order[m]);
    CHECK(path.profile[m + 1] ==
          doctest::Approx(static_cast<double>(boundary_edge_count(g, sigma)) - p.h * static_cast<double>(m + 1)));
  }
}

TEST_CASE("v table and reports are written") {
  const EnergyLandscape land(complete(3), {1.0, 0.5, 1.0});
  const auto report = classify_states(land);
  std::ostringstream v;
  write_v_table(v, land, report.v_table);
  CHECK(v.str().rfind("config_hex,energy,V\n", 0) == 0);
  CHECK(v.str().find("inf") != std::string::npos);
  std::ostringstream text;
  write_landscape_report(text, report);
  CHECK(text.str().find("gamma_star") != std::string::npos);
}

}  // TEST_SUITE
