#include <doctest.h>

#include <cmath>

#include "metastab/dynamics.hpp"
#include "metastab/error.hpp"
#include "metastab/landscape.hpp"
#include "support/oracles.hpp"

using namespace metastab;

namespace {

MultiGraph complete(std::size_t n) { return build_reference_graph({ReferenceGraph::Family::complete, n}); }

ConfigPredicate plus_only(std::size_t n) {
  return index_set(n, {static_cast<std::uint32_t>((std::uint64_t{1} << n) - 1)});
}

ConfigPredicate never() {
  return [](const SpinConfig&) { return false; };
}

double ctmc_minus_plus(const MultiGraph& g, const ModelParams& p) {
  const auto plus = static_cast<oracle::Config>((std::uint64_t{1} << g.n()) - 1);
  return oracle::ctmc_mean_hitting(g, p.J, p.h, p.beta, 0, plus);
}

}  // namespace

TEST_SUITE("glauber_dynamics") {

TEST_CASE("metropolis rate") {
  CHECK(metropolis_rate(2.0, -1.0) == 1.0);
  CHECK(metropolis_rate(2.0, 0.0) == 1.0);
  CHECK(metropolis_rate(2.0, 1.5) == doctest::Approx(std::exp(-3.0)));
  CHECK(metropolis_rate(0.0, 7.0) == 1.0);
}

TEST_CASE("chain rates follow the flip energy") {
  const auto g = complete(5);
  const ModelParams p{1.0, 0.3, 1.7};
  Rng rng(3);
  GlauberChain chain(g, p, SpinConfig::all_minus(5));
  for (int step = 0; step < 200; ++step) {
    const auto& s = chain.state();
    const double h0 = oracle::hamiltonian(g, static_cast<oracle::Config>(s.index()), p.J, p.h);
    double total = 0;
    for (Vertex v = 0; v < 5; ++v) {
      const auto flipped = static_cast<oracle::Config>(s.index() ^ (std::uint64_t{1} << v));
      const double expect = std::exp(-p.beta * std::max(0.0, oracle::hamiltonian(g, flipped, p.J, p.h) - h0));
      CHECK(chain.rate(v) == doctest::Approx(expect));
      total += expect;
    }
    CHECK(chain.total_rate() == doctest::Approx(total));
    const double t0 = chain.time();
    chain.step(rng);
    CHECK(chain.time() > t0);
  }
  CHECK(chain.events() == 200);
}

TEST_CASE("choose draws vertices in proportion to rate") {
  MultiGraph g(3);
  g.add_edge(0, 1);
  const ModelParams p{1.0, 0.2, 1.0};
  SpinConfig start = SpinConfig::from_vertices(3, {0});
  GlauberChain chain(g, p, start);
  Rng rng(17);
  std::vector<double> counts(3, 0);
  const int draws = 200000;
  for (int i = 0; i < draws; ++i) counts[static_cast<std::size_t>(chain.choose(rng))] += 1;
  double chi = 0;
  for (Vertex v = 0; v < 3; ++v) {
    const double expect = draws * chain.rate(v) / chain.total_rate();
    chi += (counts[static_cast<std::size_t>(v)] - expect) * (counts[static_cast<std::size_t>(v)] - expect) / expect;
  }
  CHECK(chi_square_pvalue(chi, 2) > 1e-3);
}

TEST_CASE("hitting time on two isolated vertices matches the exact chain") {
  const MultiGraph g(2);
  const ModelParams p{1.0, 0.5, 1.0};
  const double exact = ctmc_minus_plus(g, p);
  const auto est = estimate_mean_hitting(g, p, SpinConfig::all_minus(2), plus_only(2), never(), 10000, 5);
  CHECK(est.completed == 10000);
  CHECK(std::abs(est.mean - exact) < 3 * est.stderr_mean);
}

TEST_CASE("hitting time on a single edge matches the exact chain") {
  MultiGraph g(2);
  g.add_edge(0, 1);
  const ModelParams p{1.0, 0.4, 2.0};
  const double exact = ctmc_minus_plus(g, p);
  const auto est = estimate_mean_hitting(g, p, SpinConfig::all_minus(2), plus_only(2), never(), 10000, 6);
  CHECK(std::abs(est.mean - exact) < 3.5 * est.stderr_mean);
}

TEST_CASE("K4 crossing time at beta 3") {
  const auto g = complete(4);
  const ModelParams p{1.0, 0.5, 3.0};
  const double exact = ctmc_minus_plus(g, p);
  CHECK(exact / (std::exp(9.0) / 3) > 0.5);
  CHECK(exact / (std::exp(9.0) / 3) < 2.0);
  const auto est = estimate_mean_hitting(g, p, SpinConfig::all_minus(4), plus_only(4), never(), 3000, 9, 4);
  CHECK(std::abs(est.mean - exact) < 4 * est.stderr_mean);
}

TEST_CASE("infinite temperature crossing is fast") {
  const auto g = complete(6);
  const ModelParams p{1.0, 0.5, 0.0};
  const auto est = estimate_mean_hitting(g, p, SpinConfig::all_minus(6), plus_only(6), never(), 2000, 2);
  CHECK(est.mean == doctest::Approx(ctmc_minus_plus(g, p)).epsilon(0.1));
}

TEST_CASE("event cap truncates") {
  const auto g = complete(6);
  const ModelParams p{1.0, 0.5, 8.0};
  SimCaps caps;
  caps.max_events = 50;
  Rng rng(1);
  const auto one = simulate_hitting(g, p, SpinConfig::all_minus(6), plus_only(6), never(), rng, caps);
  CHECK(one.truncated);
  CHECK(one.events == 50);
  CHECK_THROWS_AS(estimate_mean_hitting(g, p, SpinConfig::all_minus(6), plus_only(6), never(), 20, 1, 1, caps),
                  NumericError);
}

TEST_CASE("replica results do not depend on the worker count") {
  const auto g = complete(4);
  const ModelParams p{1.0, 0.5, 1.5};
  const auto a = estimate_mean_hitting(g, p, SpinConfig::all_minus(4), plus_only(4), never(), 64, 77, 1);
  const auto b = estimate_mean_hitting(g, p, SpinConfig::all_minus(4), plus_only(4), never(), 64, 77, 4);
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t k = 0; k < a.samples.size(); ++k) {
    CHECK(a.samples[k].tau == b.samples[k].tau);
    CHECK(a.samples[k].events == b.samples[k].events);
  }
  CHECK(a.mean == b.mean);
}

TEST_CASE("gate passage") {
  const auto g = complete(5);
  const ModelParams p{1.0, 0.5, 2.0};
  const EnergyLandscape land(g, p);
  const double level = energy_barrier(land) + land.energy(land.minus());
  std::vector<std::uint32_t> high;
  for (std::uint32_t c = 0; c < land.size(); ++c) {
    if (land.energy(c) >= level - 1e-9) high.push_back(c);
  }
  // Every crossing climbs to the communication level.
  const auto all = gate_passage_probability(g, p, index_set(5, high), 500, 4);
  CHECK(all.fraction == 1.0);
  CHECK(all.fraction_any == 1.0);

  // On complete graphs C* holds every subset of the critical size, so any
  // crossing passes it; Q3 has routes around its gate.
  const auto q3 = build_reference_graph({ReferenceGraph::Family::hypercube, 3});
  const auto gates = gate_sets(EnergyLandscape(q3, {1.0, 0.5, 1.0}));
  const auto cold = gate_passage_probability(q3, {1.0, 0.5, 4.0}, index_set(8, gates.c_star), 400, 8, 4);
  const auto hot = gate_passage_probability(q3, {1.0, 0.5, 0.1}, index_set(8, gates.c_star), 400, 8, 4);
  CHECK(cold.fraction >= 0.95);
  CHECK(hot.fraction < 1.0);
  CHECK(hot.fraction < cold.fraction);
  CHECK(hot.fraction <= hot.fraction_any);
}

TEST_CASE("prefactor estimate against the exact chain") {
  const auto g = complete(4);
  const ModelParams p{1.0, 0.5, 1.0};
  const double gamma = 3.0;
  const auto pts = prefactor_estimate(g, p, gamma, {1.0, 2.0}, 4000, 21, 4);
  REQUIRE(pts.size() == 2);
  for (const auto& pt : pts) {
    const double exact = ctmc_minus_plus(g, {1.0, 0.5, pt.beta}) * std::exp(-pt.beta * gamma);
    CHECK(pt.k_hat == doctest::Approx(pt.mean * std::exp(-pt.beta * gamma)));
    CHECK(std::abs(pt.k_hat - exact) < 4 * pt.k_stderr);
  }
}

TEST_CASE("exact prefactors approach their limits") {
  // K4: the exact chain tends to one sixth.
  const auto k4 = complete(4);
  const double k4_beta8 = ctmc_minus_plus(k4, {1.0, 0.5, 8.0}) * std::exp(-8.0 * 3.0);
  CHECK(k4_beta8 == doctest::Approx(1.0 / 6).epsilon(0.02));
  // Q3 at h = 0.5: barrier 3.5.
  const auto q3 = build_reference_graph({ReferenceGraph::Family::hypercube, 3});
  const double q3_b4 = ctmc_minus_plus(q3, {1.0, 0.5, 4.0}) * std::exp(-4.0 * 3.5);
  const double q3_b8 = ctmc_minus_plus(q3, {1.0, 0.5, 8.0}) * std::exp(-8.0 * 3.5);
  CHECK(q3_b4 == doctest::Approx(q3_b8).epsilon(0.1));
}

TEST_CASE("statistics helpers") {
  const auto ms = mean_stderr({1, 2, 3, 4});
  CHECK(ms.mean == doctest::Approx(2.5));
  CHECK(ms.stderr_mean == doctest::Approx(std::sqrt(5.0 / 3 / 4)));

  const auto fit = line_fit({0, 1, 2, 3}, {1, 3, 5, 7});
  CHECK(fit.slope == doctest::Approx(2));
  CHECK(fit.intercept == doctest::Approx(1));

  std::vector<double> betas{1, 2, 3, 4};
  std::vector<double> means;
  for (double b : betas) means.push_back(std::exp(3 * b) / 3);
  const auto arr = arrhenius_fit(betas, means, {0, 0, 0, 0});
  CHECK(arr.slope == doctest::Approx(3));
  CHECK(arr.intercept == doctest::Approx(-1.0986).epsilon(1e-4));

  CHECK(chi_square_pvalue(0.0, 3) == doctest::Approx(1.0));
  CHECK(chi_square_pvalue(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-6));
  CHECK(chi_square_pvalue(18.307038053275146, 10) == doctest::Approx(0.05).epsilon(1e-6));
}

TEST_CASE("exponential law test") {
  Rng rng(31);
  std::vector<double> expo;
  for (int i = 0; i < 2000; ++i) expo.push_back(rng.exponential(0.01));
  CHECK(exponential_law_test(expo).pass);
  const std::vector<double> constant(2000, 5.0);
  CHECK_FALSE(exponential_law_test(constant).pass);
  std::vector<double> uniform;
  for (int i = 0; i < 2000; ++i) uniform.push_back(rng.uniform());
  CHECK_FALSE(exponential_law_test(uniform).pass);
}

}  // TEST_SUITE
