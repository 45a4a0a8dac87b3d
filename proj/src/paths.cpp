#include <algorithm>
#include <limits>
#include <numeric>

#include "metastab/energy.hpp"
#include "metastab/landscape.hpp"

namespace metastab {

RemovalPath greedy_removal_path(const MultiGraph& g, const ModelParams& params, const SpinConfig& sigma) {
  RemovalPath result;
  result.path.push_back(sigma);
  const double start = hamiltonian(g, sigma, params);
  SpinConfig current = sigma;
  double energy = start;
  double peak = start;
  while (current.count() > 0) {
    Vertex best = -1;
    double best_delta = std::numeric_limits<double>::infinity();
    for (Vertex v : current.plus_vertices()) {
      const double d = flip_delta(g, current, v, params);
      if (d < best_delta) {
        best_delta = d;
        best = v;
      }
    }
    if (energy < start - kEnergyTol && best_delta > kEnergyTol) break;
    current.flip(best);
    energy += best_delta;
    peak = std::max(peak, energy);
    result.path.push_back(current);
  }
  result.elevation = peak - start;
  result.end_drop = start - energy;
  return result;
}

SortedPath sorted_flip_path(const MultiGraph& g, const ModelParams& params) {
  SortedPath result;
  result.order.resize(g.n());
  std::iota(result.order.begin(), result.order.end(), Vertex{0});
  std::stable_sort(result.order.begin(), result.order.end(),
                   [&](Vertex a, Vertex b) { return g.degree(a) < g.degree(b); });

  SpinConfig sigma(g.n());
  double rise = 0.0;
  result.profile.push_back(0.0);
  for (Vertex v : result.order) {
    rise += flip_delta(g, sigma, v, params);
    sigma.flip(v);
    result.profile.push_back(rise);
  }
  const auto peak = std::max_element(result.profile.begin(), result.profile.end());
  result.height = *peak;
  result.argmax = static_cast<std::size_t>(peak - result.profile.begin());
  return result;
}

}  // namespace metastab
