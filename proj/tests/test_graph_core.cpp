#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>

#include "metastab/dynamics.hpp"
#include "metastab/error.hpp"
#include "metastab/experiments.hpp"
#include "metastab/graph.hpp"
#include "metastab/zeta.hpp"
#include "support/oracles.hpp"

using namespace metastab;

TEST_SUITE("graph_core") {

TEST_CASE("dirac degrees: constant sequence and its prefix sums") {
  Rng rng(1);
  const auto d = sample_degrees(DegreeDistribution::dirac(3), 4, rng);
  CHECK(d.size() == 4);
  for (int x : d.degrees()) CHECK(x == 3);
  CHECK(d.ell(4) == 12);
  CHECK(d.total() == 12);
}

TEST_CASE("dirac degrees: odd total cannot be fixed") {
  Rng rng(1);
  CHECK_THROWS_AS(sample_degrees(DegreeDistribution::dirac(3), 5, rng), ConfigError);
}

TEST_CASE("power-law pmf at the shift") {
  // 3^-3 over the tail sum from 3 of i^-3, the tail summed directly.
  double tail = 0;
  for (long long i = 3; i < 2'000'000; ++i) tail += std::pow(static_cast<double>(i), -3.0);
  const double expected = std::pow(3.0, -3.0) / tail;
  const auto dist = DegreeDistribution::power_law(3.0, 3);
  CHECK(dist.pmf(3) == doctest::Approx(expected).epsilon(1e-9));
  CHECK(dist.pmf(3) == doctest::Approx(0.48064).epsilon(1e-4));
  CHECK(dist.pmf(2) == 0.0);
}

TEST_CASE("power-law samples have an even total and respect the shift") {
  Rng rng(7);
  const auto dist = DegreeDistribution::parse("powerlaw 2.5 3");
  for (int rep = 0; rep < 20; ++rep) {
    const auto d = sample_degrees(dist, 51, rng);
    CHECK(d.total() % 2 == 0);
    CHECK(d.d_min() >= 3);
    CHECK(std::is_sorted(d.degrees().begin(), d.degrees().end()));
  }
}

TEST_CASE("configuration model on degrees (3,3): crossing probability by enumeration") {
  // Oracle: the 15 matchings of 6 stubs, vertex 0 owning stubs 0-2.
  const auto all = oracle::all_matchings(6);
  REQUIRE(all.size() == 15);
  int crossing = 0;
  for (const auto& m : all) {
    int cross = 0;
    for (auto [a, b] : m) cross += (a < 3) != (b < 3);
    crossing += cross == 3;
  }
  CHECK(crossing == 6);
  const double p_cross = crossing / 15.0;
  CHECK(p_cross == doctest::Approx(0.4));
  CHECK(1.0 - p_cross == doctest::Approx(0.6));

  // Sampled configuration model against the enumerated law.
  const DegreeSequence d({3, 3});
  Rng rng(11);
  int hits = 0;
  int loops = 0;
  const int runs = 30000;
  for (int r = 0; r < runs; ++r) {
    const auto g = build_cm_static(d, rng);
    hits += g.edge_count() == 3 && g.self_loops(0) == 0;
    loops += g.self_loops(0) > 0;
  }
  const double se = std::sqrt(0.4 * 0.6 / runs);
  CHECK(std::abs(hits / double(runs) - 0.4) < 4 * se);
  CHECK(std::abs(loops / double(runs) - 0.6) < 4 * se);
}

TEST_CASE("configuration model preserves every degree") {
  Rng rng(3);
  const auto d = sample_degrees(DegreeDistribution::parse("powerlaw 3 3"), 40, rng);
  for (bool dynamic : {false, true}) {
    const auto g = dynamic ? build_cm_dynamic(d, rng) : build_cm_static(d, rng);
    auto got = g.degree_vector();
    std::vector<int> want(d.degrees().begin(), d.degrees().end());
    CHECK(got == want);
  }
}

TEST_CASE("configuration model rejects d_min < 3 unless overridden") {
  Rng rng(3);
  const DegreeSequence d({2, 2, 2, 2});
  CHECK_THROWS_AS(build_cm_static(d, rng), ConfigError);
  CHECK_NOTHROW(build_cm_static(d, rng, CmOptions{true}));
  CHECK_THROWS_AS(build_cm_static(DegreeSequence({3, 3, 3, 4}), rng), ConfigError);
}

TEST_CASE("relocation step from one pair: three outcomes") {
  std::map<std::vector<std::pair<Stub, Stub>>, int> seen;
  for (Stub u = 0; u <= 2; ++u) {
    auto m = StubMatching::from_pairs(2, std::vector<std::pair<Stub, Stub>>{{0, 1}});
    m.relocate(u);
    CHECK(m.is_perfect());
    ++seen[m.pairs()];
  }
  CHECK(seen.size() == 3);
  using P = std::vector<std::pair<Stub, Stub>>;
  CHECK(seen.count(P{{0, 1}, {2, 3}}) == 1);
  CHECK(seen.count(P{{0, 3}, {1, 2}}) == 1);
  CHECK(seen.count(P{{0, 2}, {1, 3}}) == 1);
}

TEST_CASE("relocation from empty gives the single pair") {
  StubMatching m;
  Rng rng(5);
  dynamic_match_step(m, rng);
  CHECK(m.points() == 2);
  CHECK(m.partner(0) == 1);
}

TEST_CASE("dynamic matching is uniform over the three matchings of four points") {
  const auto check = matching_uniformity(4, 30000, 17, true);
  CHECK(check.cells == 3);
  CHECK(check.p_value > 0.01);
}

TEST_CASE("dynamic matching is uniform over the fifteen matchings of six points") {
  const auto check = matching_uniformity(6, 30000, 19, true);
  CHECK(check.cells == 15);
  CHECK(check.p_value > 0.01);
}

TEST_CASE("insert_pair keeps a perfect matching for every choice") {
  for (std::size_t m2 : {2u, 4u, 6u}) {
    for (Stub u1 = 0; u1 < static_cast<Stub>(m2); ++u1) {
      for (Stub u2 = 0; u2 <= static_cast<Stub>(m2); ++u2) {
        Rng rng(m2);
        auto m = uniform_matching(m2, rng);
        m.insert_pair(u1, u2);
        CHECK(m.is_perfect());
        CHECK(m.points() == m2 + 2);
      }
    }
  }
}

TEST_CASE("two-choice growth step is uniform on small matchings") {
  std::map<std::vector<std::pair<Stub, Stub>>, int> counts;
  const int runs = 30000;
  for (int r = 0; r < runs; ++r) {
    Rng rng = Rng::stream(23, r);
    auto m = uniform_matching(4, rng);
    dynamic_pair_step(m, rng);
    ++counts[m.pairs()];
  }
  CHECK(counts.size() == 15);
  double chi = 0;
  const double e = runs / 15.0;
  for (const auto& [k, c] : counts) chi += (c - e) * (c - e) / e;
  CHECK(chi_square_pvalue(chi, 14) > 0.01);
}

TEST_CASE("z moments after one step for x = 2 by enumeration") {
  // Oracle: u in {0,1,2} uniform; z counts prefix points matched inside.
  double mean = 0;
  double second = 0;
  for (Stub u = 0; u <= 2; ++u) {
    auto m = StubMatching::from_pairs(2, std::vector<std::pair<Stub, Stub>>{{0, 1}});
    m.relocate(u);
    const double z = static_cast<double>(m.internal_count(2));
    mean += z / 3;
    second += z * z / 3;
  }
  CHECK(mean == doctest::Approx(2.0 / 3));
  CHECK(second == doctest::Approx(4.0 / 3));
  CHECK(z_mean_exact(2, 1) == doctest::Approx(mean));
  CHECK(z_second_exact(2, 1) == doctest::Approx(second));
  CHECK(z_mean_exact(6, 0) == 6.0);
}

TEST_CASE("z moment closed forms agree with enumeration for x = 4, t = 1, 2") {
  // Average over the uniform start and every choice sequence.
  for (std::size_t t : {1u, 2u}) {
    double mean = 0;
    double second = 0;
    double weight_total = 0;
    for (const auto& start : oracle::all_matchings(4)) {
      std::function<void(StubMatching, std::size_t, double)> rec = [&](StubMatching m, std::size_t left, double w) {
        if (left == 0) {
          const double z = static_cast<double>(m.internal_count(4));
          mean += w * z;
          second += w * z * z;
          weight_total += w;
          return;
        }
        const std::size_t choices = m.points() + 1;
        for (Stub u = 0; u < static_cast<Stub>(choices); ++u) {
          StubMatching next = m;
          next.relocate(u);
          rec(next, left - 1, w / static_cast<double>(choices));
        }
      };
      rec(StubMatching::from_pairs(4, start), t, 1.0 / 3);
    }
    CHECK(weight_total == doctest::Approx(1.0));
    CHECK(z_mean_exact(4, t) == doctest::Approx(mean));
    CHECK(z_second_exact(4, t) == doctest::Approx(second));
  }
}

TEST_CASE("sampled z moments for x = 2, t = 1") {
  const auto row = matching_moments(2, 1, 30000, 29);
  CHECK(std::abs(row.mean - 2.0 / 3) < 3 * row.mean_se);
  CHECK(std::abs(row.second - 4.0 / 3) < 3 * row.second_se);
}

TEST_CASE("crossing deviation grows sublinearly, below the three-quarter power") {
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t M : {1000u, 10000u, 100000u}) {
    double mean = 0;
    for (int s = 0; s < 20; ++s) mean += max_cross_deviation(M, derive_seed(M, s)) / 20;
    lx.push_back(std::log(double(M)));
    ly.push_back(std::log(mean));
  }
  const double slope = line_fit(lx, ly).slope;
  CHECK(slope > 0.3);
  CHECK(slope < 0.75);
}

TEST_CASE("Erdos-Renyi extremes and edge count") {
  Rng rng(31);
  CHECK(build_er(10, 0.0, rng).edge_count() == 0);
  const auto full = build_er(10, 1.0, rng);
  CHECK(full.edge_count() == 45);
  for (int v = 0; v < 10; ++v) CHECK(full.degree(v) == 9);

  double total = 0;
  const int graphs = 200;
  for (int i = 0; i < graphs; ++i) total += static_cast<double>(build_er(100, 0.1, rng).edge_count());
  const double sigma = std::sqrt(4950 * 0.1 * 0.9 / graphs);
  CHECK(std::abs(total / graphs - 495.0) < 3 * sigma);
}

TEST_CASE("reference families") {
  const auto k4 = build_reference_graph(ReferenceGraph::parse("complete 4"));
  CHECK(k4.edge_count() == 6);
  for (int v = 0; v < 4; ++v) CHECK(k4.degree(v) == 3);
  const auto torus = build_reference_graph(ReferenceGraph::parse("torus 4"));
  CHECK(torus.edge_count() == 32);
  for (int v = 0; v < 16; ++v) CHECK(torus.degree(v) == 4);
  const auto cube = build_reference_graph(ReferenceGraph::parse("hypercube 3"));
  CHECK(cube.n() == 8);
  CHECK(cube.edge_count() == 12);
  for (int v = 0; v < 8; ++v) CHECK(cube.degree(v) == 3);
  CHECK_THROWS_AS(ReferenceGraph::parse("wheel 5"), ConfigError);
}

TEST_CASE("connectivity") {
  CHECK_FALSE(is_connected(MultiGraph(2)));
  CHECK(is_connected(build_reference_graph({ReferenceGraph::Family::complete, 4})));
  int connected = 0;
  for (int s = 0; s < 100; ++s) {
    Rng rng = Rng::stream(41, s);
    connected += is_connected(build_cm_static(sample_degrees(DegreeDistribution::dirac(3), 50, rng), rng));
  }
  CHECK(connected >= 95);
}

TEST_CASE("edge set difference") {
  const auto k3 = build_reference_graph({ReferenceGraph::Family::complete, 3});
  CHECK(edge_set_difference(k3, k3) == 0);
  MultiGraph path(3);
  path.add_edge(0, 1);
  path.add_edge(1, 2);
  CHECK(edge_set_difference(k3, path) == 1);
  CHECK_THROWS_AS(edge_set_difference(k3, MultiGraph(4)), ConfigError);
}

TEST_CASE("coupled growth: identical bases never diverge") {
  Rng rng(43);
  const auto base = sample_degrees(DegreeDistribution::dirac(3), 20, rng);
  auto pair = CoupledCM::identical(base, rng);
  for (int step = 0; step < 200; ++step) {
    pair.grow(std::vector<int>{3, 3}, rng);
    REQUIRE(pair.mismatch() == 0);
  }
  CHECK(edge_set_difference(pair.graph_a(), pair.graph_b()) == 0);
}

TEST_CASE("coupled growth: tally matches a recount and marginals keep degrees") {
  Rng rng(47);
  const auto dist = DegreeDistribution::parse("powerlaw 3 3");
  for (int s = 0; s < 10; ++s) {
    const auto base = sample_degrees(dist, 12, rng);
    auto pair = CoupledCM::independent(base, rng);
    std::vector<int> added;
    for (int step = 0; step < 30; ++step) {
      auto d = sample_degrees(dist, 2, rng);
      std::vector<int> v(d.degrees().begin(), d.degrees().end());
      pair.grow(v, rng);
      added.insert(added.end(), v.begin(), v.end());
      REQUIRE(pair.mismatch() == edge_set_difference(pair.graph_a(), pair.graph_b()));
    }
    const auto ga = pair.graph_a();
    const auto gb = pair.graph_b();
    for (std::size_t i = 0; i < added.size(); ++i) {
      const auto label = static_cast<Vertex>(base.size() + i);
      CHECK(ga.degree(label) == added[i]);
      CHECK(gb.degree(label) == added[i]);
    }
  }
}

TEST_CASE("coupled growth with unequal bases keeps both sides uniform") {
  // Bases of 2 and 4 points; one added pair of new stubs (one vertex of
  // degree 2). Each side must be uniform over its 3 or 15 matchings.
  const int runs = 30000;
  std::map<std::vector<std::pair<Stub, Stub>>, int> small_side;
  std::map<std::vector<std::pair<Stub, Stub>>, int> big_side;
  for (int r = 0; r < runs; ++r) {
    Rng rng = Rng::stream(53, r);
    auto a = uniform_matching(2, rng);
    auto b = uniform_matching(4, rng);
    CoupledCM pair({2}, a, {2, 2}, b);
    pair.grow(std::vector<int>{2}, rng);
    // Recover the matchings from the graphs is lossy; use the edge multisets.
    const MultiGraph ga = pair.graph_a();
    const MultiGraph gb = pair.graph_b();
    std::vector<std::pair<Stub, Stub>> ea;
    for (const auto& e : ga.edges()) ea.emplace_back(e.u, e.v);
    std::sort(ea.begin(), ea.end());
    std::vector<std::pair<Stub, Stub>> eb;
    for (const auto& e : gb.edges()) eb.emplace_back(e.u, e.v);
    std::sort(eb.begin(), eb.end());
    ++small_side[ea];
    ++big_side[eb];
  }
  // Side a: stubs {0,1} of vertex 0, {2,3} of the new vertex 2. Matchings
  // collapse to {(0,0),(2,2)} once and {(0,2),(0,2)} twice.
  using E = std::vector<std::pair<Stub, Stub>>;
  const double loops_a = small_side[E{{0, 0}, {2, 2}}] / double(runs);
  CHECK(std::abs(loops_a - 1.0 / 3) < 4 * std::sqrt(2.0 / 9 / runs));
  // Side b: vertices 0, 1 and new vertex 2, two stubs each; 15 matchings.
  // The all-loops multigraph arises from exactly one matching.
  const double loops_b = big_side[E{{0, 0}, {1, 1}, {2, 2}}] / double(runs);
  CHECK(std::abs(loops_b - 1.0 / 15) < 4 * std::sqrt((1.0 / 15) * (14.0 / 15) / runs));
}

TEST_CASE("edge list round trip") {
  MultiGraph g(3);
  g.add_edge(0, 1);
  g.add_edge(0, 1);
  g.add_edge(2, 2);
  std::stringstream io;
  write_edge_list(io, g);
  const auto back = read_edge_list(io);
  CHECK(back.n() == 3);
  CHECK(edge_set_difference(g, back) == 0);
  CHECK(back.self_loops(2) == 1);

  std::stringstream bad("3 2\n0 1\n");
  CHECK_THROWS_AS(read_edge_list(bad), ConfigError);
  std::stringstream range("2 1\n0 5\n");
  CHECK_THROWS_AS(read_edge_list(range), ConfigError);
}

TEST_CASE("degree file round trip") {
  std::stringstream io;
  write_degree_file(io, DegreeSequence({4, 3, 3}));
  CHECK(read_degree_file(io) == DegreeSequence({3, 3, 4}));
  std::stringstream bad("3\nx\n");
  CHECK_THROWS_AS(read_degree_file(bad), ConfigError);
}

TEST_CASE("seeded generation is deterministic") {
  Rng a(99);
  Rng b(99);
  const auto da = sample_degrees(DegreeDistribution::parse("powerlaw 3 3"), 30, a);
  const auto db = sample_degrees(DegreeDistribution::parse("powerlaw 3 3"), 30, b);
  CHECK(da == db);
  CHECK(edge_set_difference(build_cm_static(da, a), build_cm_static(db, b)) == 0);
}

}  // TEST_SUITE
