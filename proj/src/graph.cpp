#include "metastab/graph.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <sstream>

#include "metastab/error.hpp"

namespace metastab {

void MultiGraph::add_edge(Vertex u, Vertex v) {
  const auto size = static_cast<Vertex>(n());
  if (u < 0 || v < 0 || u >= size || v >= size) {
    throw ConfigError("add_edge: vertex out of range (" + std::to_string(u) + ", " +
                      std::to_string(v) + ") for n=" + std::to_string(n()));
  }
  if (u > v) std::swap(u, v);
  if (u == v) {
    ++loops_[u];
  } else {
    adjacency_[u].push_back(v);
    adjacency_[v].push_back(u);
  }
  edges_.push_back({u, v});
}

std::vector<int> MultiGraph::degree_vector() const {
  std::vector<int> out(n());
  for (std::size_t v = 0; v < n(); ++v) out[v] = degree(static_cast<Vertex>(v));
  return out;
}

bool is_connected(const MultiGraph& g) {
  if (g.n() <= 1) return true;
  std::vector<char> seen(g.n(), 0);
  std::queue<Vertex> frontier;
  frontier.push(0);
  seen[0] = 1;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const Vertex v = frontier.front();
    frontier.pop();
    for (Vertex w : g.neighbors(v)) {
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        frontier.push(w);
      }
    }
  }
  return reached == g.n();
}

std::size_t edge_set_difference(const MultiGraph& a, const MultiGraph& b) {
  if (a.n() != b.n()) {
    throw ConfigError("edge_set_difference: vertex counts differ (" + std::to_string(a.n()) +
                      " vs " + std::to_string(b.n()) + ")");
  }
  std::map<std::pair<Vertex, Vertex>, long long> balance;
  for (const Edge& e : a.edges()) ++balance[{e.u, e.v}];
  for (const Edge& e : b.edges()) --balance[{e.u, e.v}];
  std::size_t diff = 0;
  for (const auto& [edge, count] : balance) diff += static_cast<std::size_t>(count < 0 ? -count : count);
  return diff;
}

std::vector<Vertex> stub_owners(std::span<const int> degrees) {
  std::vector<Vertex> owners;
  for (std::size_t v = 0; v < degrees.size(); ++v) {
    owners.insert(owners.end(), static_cast<std::size_t>(degrees[v]), static_cast<Vertex>(v));
  }
  return owners;
}

MultiGraph collapse(const StubMatching& matching, std::span<const Vertex> owners, std::size_t n) {
  if (owners.size() != matching.points()) {
    throw ConfigError("collapse: stub owner map does not cover the matching");
  }
  MultiGraph g(n);
  for (const auto& [s, t] : matching.pairs()) {
    g.add_edge(owners[static_cast<std::size_t>(s)], owners[static_cast<std::size_t>(t)]);
  }
  return g;
}

namespace {

void check_cm_input(const DegreeSequence& degrees, CmOptions options) {
  if (degrees.total() % 2 != 0) throw ConfigError("configuration model: odd total degree");
  if (!options.allow_low_degree && degrees.size() > 0 && degrees.d_min() < 3) {
    throw ConfigError("configuration model: d_min < 3 (set allow_low_degree to override)");
  }
}

}  // namespace

MultiGraph build_cm_static(const DegreeSequence& degrees, Rng& rng, CmOptions options) {
  check_cm_input(degrees, options);
  const auto owners = stub_owners(degrees.degrees());
  return collapse(uniform_matching(owners.size(), rng), owners, degrees.size());
}

MultiGraph build_cm_dynamic(const DegreeSequence& degrees, Rng& rng, CmOptions options) {
  check_cm_input(degrees, options);
  const auto owners = stub_owners(degrees.degrees());
  StubMatching matching;
  while (matching.points() < owners.size()) dynamic_match_step(matching, rng);
  return collapse(matching, owners, degrees.size());
}

MultiGraph build_er(std::size_t n, double p, Rng& rng) {
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("build_er: p must lie in [0, 1]");
  MultiGraph g(n);
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) {
      if (rng.bernoulli(p)) g.add_edge(static_cast<Vertex>(u), static_cast<Vertex>(v));
    }
  }
  return g;
}

ReferenceGraph ReferenceGraph::parse(const std::string& text) {
  std::istringstream in(text);
  std::string family;
  long long size = 0;
  if (!(in >> family >> size) || size < 1) {
    throw ConfigError("reference graph: expected '<complete|torus|hypercube> <size>' got '" + text + "'");
  }
  ReferenceGraph spec;
  spec.size = static_cast<std::size_t>(size);
  if (family == "complete") {
    spec.family = Family::complete;
  } else if (family == "torus") {
    spec.family = Family::torus;
  } else if (family == "hypercube") {
    spec.family = Family::hypercube;
  } else {
    throw ConfigError("reference graph: unknown family '" + family + "'");
  }
  return spec;
}

std::string ReferenceGraph::to_string() const {
  switch (family) {
    case Family::complete: return "complete " + std::to_string(size);
    case Family::torus: return "torus " + std::to_string(size);
    case Family::hypercube: return "hypercube " + std::to_string(size);
  }
  return {};
}

MultiGraph build_reference_graph(const ReferenceGraph& spec) {
  if (spec.size < 1) throw ConfigError("reference graph: size must be >= 1");
  switch (spec.family) {
    case ReferenceGraph::Family::complete: {
      MultiGraph g(spec.size);
      for (std::size_t u = 0; u < spec.size; ++u)
        for (std::size_t v = u + 1; v < spec.size; ++v) g.add_edge(static_cast<Vertex>(u), static_cast<Vertex>(v));
      return g;
    }
    case ReferenceGraph::Family::torus: {
      // L x L grid with periodic boundary: each site links to its right and
      // lower neighbour, 2 L^2 edges in total.
      const std::size_t L = spec.size;
      MultiGraph g(L * L);
      for (std::size_t r = 0; r < L; ++r) {
        for (std::size_t c = 0; c < L; ++c) {
          const auto site = static_cast<Vertex>(r * L + c);
          g.add_edge(site, static_cast<Vertex>(r * L + (c + 1) % L));
          g.add_edge(site, static_cast<Vertex>(((r + 1) % L) * L + c));
        }
      }
      return g;
    }
    case ReferenceGraph::Family::hypercube: {
      if (spec.size > 24) throw CapacityError("hypercube: dimension above 24");
      const std::size_t count = std::size_t{1} << spec.size;
      MultiGraph g(count);
      for (std::size_t a = 0; a < count; ++a) {
        for (std::size_t bit = 0; bit < spec.size; ++bit) {
          const std::size_t b = a ^ (std::size_t{1} << bit);
          if (a < b) g.add_edge(static_cast<Vertex>(a), static_cast<Vertex>(b));
        }
      }
      return g;
    }
  }
  return MultiGraph{};
}

}  // namespace metastab
