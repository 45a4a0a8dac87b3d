#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "metastab/rng.hpp"

namespace metastab {

using Vertex = std::int32_t;
using Stub = std::int64_t;

// ---------------------------------------------------------------------------
// Degree distributions and sequences
// ---------------------------------------------------------------------------

struct DegreeDistribution {
  enum class Kind { dirac, power_law };

  Kind kind = Kind::dirac;
  int r = 3;          // dirac: every degree equals r
  double tau = 3.0;   // power law: P[d = shift + k] proportional to (shift + k)^{-tau}
  int shift = 3;

  static DegreeDistribution dirac(int r);
  static DegreeDistribution power_law(double tau, int shift);

  // "dirac 3" or "powerlaw 3 3" (tau, shift).
  static DegreeDistribution parse(const std::string& text);
  std::string to_string() const;

  double pmf(int degree) const;
  double mean() const;
};

// Degrees sorted ascending with prefix sums ell(m) = d_1 + ... + d_m.
class DegreeSequence {
 public:
  DegreeSequence() = default;

  // Sorts the input. Requires every degree >= 1 and an even total.
  explicit DegreeSequence(std::vector<int> degrees);

  std::size_t size() const { return degrees_.size(); }
  int operator[](std::size_t i) const { return degrees_[i]; }
  std::span<const int> degrees() const { return degrees_; }

  // Sum of the m smallest degrees, 0 <= m <= n.
  long long ell(std::size_t m) const { return prefix_[m]; }
  long long total() const { return prefix_.back(); }
  int d_min() const { return degrees_.empty() ? 0 : degrees_.front(); }
  int d_max() const { return degrees_.empty() ? 0 : degrees_.back(); }
  double d_ave() const;

  friend bool operator==(const DegreeSequence&, const DegreeSequence&) = default;

 private:
  std::vector<int> degrees_;
  std::vector<long long> prefix_{0};
};

// I.i.d. draws conditioned on an even total by whole-sequence rejection
// (at most 1000 attempts), returned sorted ascending.
DegreeSequence sample_degrees(const DegreeDistribution& dist, std::size_t n, Rng& rng);

// ---------------------------------------------------------------------------
// Multigraph
// ---------------------------------------------------------------------------

struct Edge {
  Vertex u;
  Vertex v;
  friend bool operator==(const Edge&, const Edge&) = default;
};

// Undirected multigraph. Multi-edges and self-loops are kept explicitly.
// neighbors(v) lists non-loop neighbours with multiplicity; loops are counted
// separately and add two to the degree each.
class MultiGraph {
 public:
  explicit MultiGraph(std::size_t n = 0) : adjacency_(n), loops_(n, 0) {}

  void add_edge(Vertex u, Vertex v);

  std::size_t n() const { return adjacency_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  int degree(Vertex v) const { return static_cast<int>(adjacency_[v].size()) + 2 * loops_[v]; }
  int self_loops(Vertex v) const { return loops_[v]; }
  std::span<const Vertex> neighbors(Vertex v) const { return adjacency_[v]; }
  std::span<const Edge> edges() const { return edges_; }
  std::vector<int> degree_vector() const;

 private:
  std::vector<std::vector<Vertex>> adjacency_;
  std::vector<int> loops_;
  std::vector<Edge> edges_;
};

bool is_connected(const MultiGraph& g);

// |E delta E'| of the edge multisets under the identity labelling.
std::size_t edge_set_difference(const MultiGraph& a, const MultiGraph& b);

// ---------------------------------------------------------------------------
// Stub matchings and the configuration model
// ---------------------------------------------------------------------------

// Perfect matching of the points {0, ..., 2m-1}. Stubs are numbered vertex by
// vertex in ascending vertex order, so a prefix of points is a prefix of the
// degree sequence.
class StubMatching {
 public:
  StubMatching() = default;

  static StubMatching from_pairs(std::size_t points, std::span<const std::pair<Stub, Stub>> pairs);

  std::size_t points() const { return partner_.size(); }
  Stub partner(Stub s) const { return partner_[static_cast<std::size_t>(s)]; }

  // Adds points 2m, 2m+1 given the choice u in {0, ..., 2m}: u == 2m pairs the
  // two new points; otherwise u is re-paired with 2m+1 and its old partner
  // with 2m.
  void relocate(Stub u);

  // Adds points 2m, 2m+1 given u1 in {0, ..., 2m-1} and u2 in {0, ..., 2m}.
  // u2 == 2m pairs the new points. Otherwise 2m is paired with u1 and 2m+1
  // with u2 (only 2m+1 with u2 when u1 == u2), and the stubs left without a
  // partner are paired with each other.
  void insert_pair(Stub u1, Stub u2);

  // Number of points in {0, ..., x-1} whose partner is also below x.
  std::size_t internal_count(std::size_t x) const;

  // Pairs (a, b) with a < b, sorted.
  std::vector<std::pair<Stub, Stub>> pairs() const;

  bool is_perfect() const;

  friend bool operator==(const StubMatching&, const StubMatching&) = default;

 private:
  void link(Stub a, Stub b) {
    partner_[static_cast<std::size_t>(a)] = b;
    partner_[static_cast<std::size_t>(b)] = a;
  }

  std::vector<Stub> partner_;
};

// Uniform perfect matching of `points` points (Fisher-Yates shuffle).
StubMatching uniform_matching(std::size_t points, Rng& rng);

// One step of the growth construction: u uniform on {0, ..., 2m}, then
// relocate(u). Uniform input gives a uniform output.
void dynamic_match_step(StubMatching& matching, Rng& rng);

// One step of the two-choice growth scheme used for coupling.
void dynamic_pair_step(StubMatching& matching, Rng& rng);

// Owner vertex of every stub, stubs numbered vertex by vertex.
std::vector<Vertex> stub_owners(std::span<const int> degrees);

MultiGraph collapse(const StubMatching& matching, std::span<const Vertex> owners, std::size_t n);

struct CmOptions {
  // Accept degree sequences with d_min < 3 (test graphs).
  bool allow_low_degree = false;
};

// Configuration model: uniform matching of the stubs collapsed to a multigraph.
MultiGraph build_cm_static(const DegreeSequence& degrees, Rng& rng, CmOptions options = {});

// Same law, built by growing the matching one pair of points at a time.
MultiGraph build_cm_dynamic(const DegreeSequence& degrees, Rng& rng, CmOptions options = {});

MultiGraph build_er(std::size_t n, double p, Rng& rng);

struct ReferenceGraph {
  enum class Family { complete, torus, hypercube };
  Family family = Family::complete;
  std::size_t size = 1;  // n for complete, side L for torus, dimension for hypercube

  static ReferenceGraph parse(const std::string& text);
  std::string to_string() const;
};

MultiGraph build_reference_graph(const ReferenceGraph& spec);

// ---------------------------------------------------------------------------
// Coupled growth of two configuration models
// ---------------------------------------------------------------------------

// Two configuration models grown by the two-choice scheme from shared uniform
// choices. When the bases have different total degree the larger side
// redraws each choice with probability (l_big - l_small) / range_big, uniformly
// among the extra stubs, which keeps both marginals uniform.
//
// Vertices carry a common labelling: base vertex i has label i on both sides,
// the j-th added vertex has label max(n_a, n_b) + j on both sides.
class CoupledCM {
 public:
  CoupledCM(std::vector<int> degrees_a, StubMatching matching_a, std::vector<int> degrees_b,
            StubMatching matching_b);

  // Two independent configuration models on the same degrees.
  static CoupledCM independent(const DegreeSequence& degrees, Rng& rng);
  // Two copies of one configuration model.
  static CoupledCM identical(const DegreeSequence& degrees, Rng& rng);

  // Adds vertices with the given degrees to both graphs (even total).
  void grow(std::span<const int> new_degrees, Rng& rng);

  // Graphs in the common labelling, both on label_count() vertices.
  MultiGraph graph_a() const;
  MultiGraph graph_b() const;
  std::size_t label_count() const;

  // Incrementally maintained |E_a delta E_b|.
  std::size_t mismatch() const { return mismatch_; }
  // Stubs whose partner label differs between the two sides, over stubs of
  // the smaller side.
  std::size_t stub_mismatch() const;

  std::size_t added_vertices() const { return added_.size(); }
  std::size_t redraws() const { return redraws_; }
  long long total_degree_a() const { return static_cast<long long>(a_.matching.points()); }
  long long total_degree_b() const { return static_cast<long long>(b_.matching.points()); }

 private:
  struct Side {
    std::vector<int> base_degrees;
    StubMatching matching;
    std::vector<Vertex> owner_label;
  };

  void add_edge_balance(Vertex x, Vertex y, int side_sign, int delta);
  void apply_insert(Side& side, int side_sign, Stub u1, Stub u2);

  Side a_;
  Side b_;
  std::vector<int> added_;
  std::size_t base_labels_ = 0;
  std::unordered_map<std::uint64_t, long long> balance_;
  std::size_t mismatch_ = 0;
  std::size_t redraws_ = 0;
};

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

// Header "n m", then one "u v" line per edge (0-based, loops as "v v",
// multi-edges repeated).
void write_edge_list(std::ostream& out, const MultiGraph& g);
MultiGraph read_edge_list(std::istream& in);
MultiGraph read_edge_list_file(const std::string& path);
void write_edge_list_file(const std::string& path, const MultiGraph& g);

// One integer per line.
void write_degree_file(std::ostream& out, const DegreeSequence& degrees);
DegreeSequence read_degree_file(std::istream& in);
DegreeSequence read_degree_file(const std::string& path);

}  // namespace metastab
