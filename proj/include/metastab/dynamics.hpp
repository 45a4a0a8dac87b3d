#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "metastab/graph.hpp"
#include "metastab/rng.hpp"
#include "metastab/spin.hpp"

namespace metastab {

// Metropolis rate of a move raising the energy by delta.
double metropolis_rate(double beta, double delta);

// Continuous-time Glauber dynamics, simulated rejection-free: the next flip is
// drawn in proportion to its rate and time advances by an exponential holding
// time with the total rate.
class GlauberChain {
 public:
  GlauberChain(const MultiGraph& g, const ModelParams& params, SpinConfig start);

  const SpinConfig& state() const { return state_; }
  double time() const { return time_; }
  std::uint64_t events() const { return events_; }
  double rate(Vertex v) const { return rates_[static_cast<std::size_t>(v)]; }
  double total_rate() const;

  // Draws the next flip without applying it.
  Vertex choose(Rng& rng) const;
  // Advances time and applies one flip. Returns the flipped vertex.
  Vertex step(Rng& rng);

 private:
  void flip(Vertex v);
  void refresh(Vertex v);

  const MultiGraph& g_;
  ModelParams params_;
  SpinConfig state_;
  std::vector<long long> field_;  // sum of neighbour spins, loops excluded
  std::vector<double> rates_;
  double time_ = 0;
  std::uint64_t events_ = 0;
};

using ConfigPredicate = std::function<bool(const SpinConfig&)>;

// Membership test for a set of configurations given by bitmask indices.
ConfigPredicate index_set(std::size_t n, const std::vector<std::uint32_t>& configs);

struct SimCaps {
  std::uint64_t max_events = 1'000'000'000;
  double max_seconds = 0;  // 0: no wall-clock cap
};

struct HittingSample {
  double tau = 0;
  std::uint64_t events = 0;
  bool visited_gate = false;      // gate seen on the excursion from the last visit to start
  bool visited_gate_any = false;  // gate seen at any time
  std::uint64_t returns_to_start = 0;
  bool truncated = false;
};

// Runs from `start` until the target is entered after the first jump.
HittingSample simulate_hitting(const MultiGraph& g, const ModelParams& params, const SpinConfig& start,
                               const ConfigPredicate& target, const ConfigPredicate& gate, Rng& rng,
                               const SimCaps& caps = {});

struct HittingEstimate {
  double mean = 0;
  double stderr_mean = 0;
  std::size_t completed = 0;
  std::size_t truncated = 0;
  std::vector<HittingSample> samples;  // by replica index
};

// Replica k runs on Rng::stream(seed, k); results are folded in replica order.
HittingEstimate estimate_mean_hitting(const MultiGraph& g, const ModelParams& params, const SpinConfig& start,
                                      const ConfigPredicate& target, const ConfigPredicate& gate,
                                      std::size_t replicas, std::uint64_t seed, std::size_t workers = 1,
                                      const SimCaps& caps = {});

struct GatePassage {
  double fraction = 0;      // final excursion through the gate
  double fraction_any = 0;  // gate seen on any excursion
  std::size_t completed = 0;
  std::size_t truncated = 0;
};

// Crossings from all minus to all plus.
GatePassage gate_passage_probability(const MultiGraph& g, const ModelParams& params, const ConfigPredicate& gate,
                                     std::size_t replicas, std::uint64_t seed, std::size_t workers = 1,
                                     const SimCaps& caps = {});

struct PrefactorPoint {
  double beta = 0;
  double mean = 0;
  double stderr_mean = 0;
  double k_hat = 0;
  double k_stderr = 0;
};

// K(beta) = exp(-beta Gamma*) E[tau] from minus to plus, per beta.
std::vector<PrefactorPoint> prefactor_estimate(const MultiGraph& g, const ModelParams& params, double gamma_star,
                                               const std::vector<double>& betas, std::size_t replicas,
                                               std::uint64_t seed, std::size_t workers = 1,
                                               const SimCaps& caps = {});

// ---------------------------------------------------------------------------
// Statistics
// ---------------------------------------------------------------------------

struct MeanStderr {
  double mean = 0;
  double stderr_mean = 0;
};
MeanStderr mean_stderr(const std::vector<double>& xs);

struct LineFit {
  double slope = 0;
  double intercept = 0;
  double slope_stderr = 0;
  double intercept_stderr = 0;
};

// Least squares of y on x; weights optional (empty: unweighted).
LineFit line_fit(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& weights = {});

struct ArrheniusFit {
  std::vector<double> betas;
  std::vector<double> log_means;
  double slope = 0;      // estimate of Gamma*
  double intercept = 0;  // estimate of log K*
  double slope_stderr = 0;
  double intercept_stderr = 0;
};

// Weighted least squares of log mean against beta with var(log mean) taken as
// (stderr / mean)^2; zero stderr everywhere gives an unweighted fit.
ArrheniusFit arrhenius_fit(const std::vector<double>& betas, const std::vector<double>& means,
                           const std::vector<double>& stderrs);

struct KsResult {
  double statistic = 0;
  double threshold = 0;
  bool pass = false;
};

// Samples scaled by their mean against the unit exponential; threshold
// scale * 1.36 / sqrt(N).
KsResult exponential_law_test(const std::vector<double>& samples, double scale = 1.0);

// Upper tail P[X >= x] of a chi-square variable with dof degrees of freedom.
double chi_square_pvalue(double x, double dof);

}  // namespace metastab
