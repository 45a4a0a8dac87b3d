#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "metastab/graph.hpp"
#include "metastab/spin.hpp"

namespace metastab {

inline constexpr std::size_t kBarrierCap = 24;
inline constexpr std::size_t kGateCap = 20;
inline constexpr double kEnergyTol = 1e-9;

struct LandscapeOptions {
  // Lift the vertex caps above (memory grows as 2^n words).
  bool override_cap = false;
  // Permit h = 0 (symmetry tests only).
  bool allow_zero_field = false;
};

// All 2^n configurations of a graph with their energies, indexed by bitmask,
// and the insertion order (energy, index) of the sublevel filtration.
class EnergyLandscape {
 public:
  EnergyLandscape(const MultiGraph& g, const ModelParams& params, LandscapeOptions options = {},
                  std::size_t cap = kBarrierCap);

  std::size_t n() const { return n_; }
  std::size_t size() const { return energy_.size(); }
  const ModelParams& params() const { return params_; }
  const LandscapeOptions& options() const { return options_; }
  double energy(std::uint32_t config) const { return energy_[config]; }
  std::uint32_t minus() const { return 0; }
  std::uint32_t plus() const { return static_cast<std::uint32_t>(size() - 1); }
  const std::vector<std::uint32_t>& order() const { return order_; }
  const std::vector<double>& energies() const { return energy_; }
  // Position of every configuration in the insertion order.
  std::vector<std::uint32_t> ranks() const;

  // Boundary size and plus count of a configuration.
  std::int64_t boundary(std::uint32_t config) const { return boundary_[config]; }

 private:
  std::size_t n_;
  ModelParams params_;
  LandscapeOptions options_;
  std::vector<double> energy_;
  std::vector<std::int32_t> boundary_;
  std::vector<std::uint32_t> order_;
};

// Min over single-flip paths from A to B of the max energy along the path.
double communication_height(const EnergyLandscape& land, const std::vector<std::uint32_t>& a,
                            const std::vector<std::uint32_t>& b);

// Phi(x, target) for every configuration x.
std::vector<double> heights_to(const EnergyLandscape& land, std::uint32_t target);

// V_x for every configuration; +infinity where no strictly lower state exists.
std::vector<double> stability_levels(const EnergyLandscape& land);

double energy_barrier(const EnergyLandscape& land);

struct LandscapeReport {
  std::size_t n = 0;
  double gamma_star = 0;
  double energy_minus = 0;
  double energy_plus = 0;
  double v_minus = 0;
  std::vector<std::uint32_t> omega_stab;
  std::vector<std::uint32_t> omega_meta;
  double v_meta = 0;
  bool h_holds = false;
  std::vector<double> v_table;
};

// Requires h > 0.
LandscapeReport classify_states(const EnergyLandscape& land);

struct GateReport {
  double level = 0;  // Gamma* + H(minus)
  std::vector<std::uint32_t> p_star;
  std::vector<std::uint32_t> c_star;
  std::size_t valley_size = 0;
  // Configurations strictly below the level, outside the minus valley, that
  // reach plus and touch the valley: crossings that would bypass the level.
  std::vector<std::uint32_t> below_level_extensions;
  bool structural_error = false;
  std::string note;
};

// Requires n <= kGateCap unless the landscape was built with override_cap.
GateReport gate_sets(const EnergyLandscape& land);

// The minus valley {x : Phi(x, minus) < Phi(x, plus)} as a membership mask.
std::vector<char> minus_valley(const EnergyLandscape& land);

// ---------------------------------------------------------------------------
// Explicit paths
// ---------------------------------------------------------------------------

struct RemovalPath {
  std::vector<SpinConfig> path;  // starts at sigma
  double elevation = 0;          // max H along the path minus H(sigma)
  double end_drop = 0;           // H(sigma) - H(end)
};

// Removes the +1 vertex with the smallest energy increase (lowest index on
// ties) until below H(sigma) with no downhill removal left, or until empty.
RemovalPath greedy_removal_path(const MultiGraph& g, const ModelParams& params, const SpinConfig& sigma);

struct SortedPath {
  std::vector<Vertex> order;    // vertices by (degree, index)
  std::vector<double> profile;  // H(gamma_m) - H(minus), m = 0..n
  double height = 0;
  std::size_t argmax = 0;
};

// Flips vertices to +1 in ascending degree order.
SortedPath sorted_flip_path(const MultiGraph& g, const ModelParams& params);

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

std::string config_hex(std::uint32_t config);
void write_landscape_report(std::ostream& out, const LandscapeReport& report);
void write_gate_report(std::ostream& out, const GateReport& report);
// Rows "config_hex,energy,V".
void write_v_table(std::ostream& out, const EnergyLandscape& land, const std::vector<double>& v);

}  // namespace metastab
