#pragma once

#include <cstdint>

#include "metastab/graph.hpp"
#include "metastab/spin.hpp"

namespace metastab {

// H = -(J/2) sum_edges s(v)s(w) - (h/2) sum_v s(v), multi-edges counted with
// multiplicity, each self-loop contributing the constant -J/2.
double hamiltonian(const MultiGraph& g, const SpinConfig& sigma, const ModelParams& params);

// H(sigma with v flipped) - H(sigma), from v's adjacency only.
double flip_delta(const MultiGraph& g, const SpinConfig& sigma, Vertex v, const ModelParams& params);

// Edges with one +1 and one -1 endpoint, with multiplicity.
std::int64_t boundary_edge_count(const MultiGraph& g, const SpinConfig& sigma);

// Total degree of the +1 vertices.
std::int64_t plus_degree_sum(const MultiGraph& g, const SpinConfig& sigma);

}  // namespace metastab
