#include <algorithm>
#include <cmath>
#include <queue>

#include "metastab/error.hpp"
#include "metastab/landscape.hpp"

namespace metastab {

std::vector<char> minus_valley(const EnergyLandscape& land) {
  const auto phi_minus = heights_to(land, land.minus());
  const auto phi_plus = heights_to(land, land.plus());
  std::vector<char> valley(land.size(), 0);
  for (std::uint32_t c = 0; c < land.size(); ++c) valley[c] = phi_minus[c] < phi_plus[c] - kEnergyTol;
  return valley;
}

GateReport gate_sets(const EnergyLandscape& land) {
  if (land.n() > kGateCap && !land.options().override_cap) {
    throw CapacityError("gate_sets: n=" + std::to_string(land.n()) + " exceeds the cap of " +
                        std::to_string(kGateCap) + " vertices");
  }
  GateReport report;
  const std::size_t n = land.n();
  const std::size_t size = land.size();
  report.level = communication_height(land, {land.minus()}, {land.plus()});
  const double level = report.level;
  const auto valley = minus_valley(land);
  report.valley_size = static_cast<std::size_t>(std::count(valley.begin(), valley.end(), 1));

  // Configurations outside the valley that reach plus without exceeding the level.
  std::vector<char> reach(size, 0);
  std::queue<std::uint32_t> frontier;
  reach[land.plus()] = 1;
  frontier.push(land.plus());
  while (!frontier.empty()) {
    const std::uint32_t c = frontier.front();
    frontier.pop();
    for (std::size_t v = 0; v < n; ++v) {
      const std::uint32_t nb = c ^ (std::uint32_t{1} << v);
      if (reach[nb] || valley[nb] || land.energy(nb) > level + kEnergyTol) continue;
      reach[nb] = 1;
      frontier.push(nb);
    }
  }

  const auto touches = [&](std::uint32_t c, const std::vector<char>& mask) {
    for (std::size_t v = 0; v < n; ++v) {
      if (mask[c ^ (std::uint32_t{1} << v)]) return true;
    }
    return false;
  };

  std::vector<char> in_c(size, 0);
  bool level_seen = false;
  for (std::uint32_t c = 0; c < size; ++c) {
    const double e = land.energy(c);
    if (std::abs(e - level) <= kEnergyTol) {
      level_seen = true;
      // A path to plus that stays out of the valley after its first step.
      const bool exits = reach[c] || (valley[c] && touches(c, reach));
      if (exits && touches(c, valley)) in_c[c] = 1;
    } else if (e < level - kEnergyTol && reach[c] && touches(c, valley)) {
      report.below_level_extensions.push_back(c);
    }
  }
  for (std::uint32_t c = 0; c < size; ++c) {
    if (in_c[c]) report.c_star.push_back(c);
    if (valley[c] && touches(c, in_c)) report.p_star.push_back(c);
  }

  if (!level_seen) {
    report.structural_error = true;
    report.note = "no configuration at the barrier level";
  } else if (report.c_star.empty()) {
    report.structural_error = true;
    report.note = "empty critical set";
  } else if (!report.below_level_extensions.empty()) {
    report.note = "valley boundary also touched below the barrier level";
  }
  return report;
}

}  // namespace metastab
