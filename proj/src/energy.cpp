#include "metastab/energy.hpp"

#include "metastab/error.hpp"

namespace metastab {

namespace {

void check_size(const MultiGraph& g, const SpinConfig& sigma) {
  if (g.n() != sigma.n()) throw ConfigError("spin config size does not match the graph");
}

}  // namespace

double hamiltonian(const MultiGraph& g, const SpinConfig& sigma, const ModelParams& params) {
  check_size(g, sigma);
  long long pair_sum = 0;
  for (const Edge& e : g.edges()) pair_sum += sigma.spin(e.u) * sigma.spin(e.v);
  const long long plus = static_cast<long long>(sigma.count());
  const long long field_sum = 2 * plus - static_cast<long long>(g.n());
  return -0.5 * params.J * static_cast<double>(pair_sum) - 0.5 * params.h * static_cast<double>(field_sum);
}

double flip_delta(const MultiGraph& g, const SpinConfig& sigma, Vertex v, const ModelParams& params) {
  check_size(g, sigma);
  long long local = 0;
  for (Vertex w : g.neighbors(v)) local += sigma.spin(w);
  const int s = sigma.spin(v);
  return params.J * static_cast<double>(s * local) + params.h * s;
}

std::int64_t boundary_edge_count(const MultiGraph& g, const SpinConfig& sigma) {
  check_size(g, sigma);
  std::int64_t count = 0;
  for (const Edge& e : g.edges()) count += sigma.plus(e.u) != sigma.plus(e.v);
  return count;
}

std::int64_t plus_degree_sum(const MultiGraph& g, const SpinConfig& sigma) {
  check_size(g, sigma);
  std::int64_t total = 0;
  for (Vertex v : sigma.plus_vertices()) total += g.degree(v);
  return total;
}

}  // namespace metastab
