#include "metastab/dynamics.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <memory>
#include <mutex>
#include <thread>

#include "metastab/error.hpp"

namespace metastab {

double metropolis_rate(double beta, double delta) { return delta > 0.0 ? std::exp(-beta * delta) : 1.0; }

GlauberChain::GlauberChain(const MultiGraph& g, const ModelParams& params, SpinConfig start)
    : g_(g), params_(params), state_(std::move(start)), field_(g.n(), 0), rates_(g.n(), 0.0) {
  params.validate(true);
  if (state_.n() != g.n()) throw ConfigError("chain: start configuration does not match the graph");
  if (g.n() == 0) throw ConfigError("chain: empty graph");
  for (std::size_t v = 0; v < g.n(); ++v) {
    for (Vertex w : g.neighbors(static_cast<Vertex>(v))) field_[v] += state_.spin(w);
  }
  for (std::size_t v = 0; v < g.n(); ++v) refresh(static_cast<Vertex>(v));
}

void GlauberChain::refresh(Vertex v) {
  const auto i = static_cast<std::size_t>(v);
  const int s = state_.spin(v);
  const double delta = params_.J * static_cast<double>(s * field_[i]) + params_.h * s;
  rates_[i] = metropolis_rate(params_.beta, delta);
}

double GlauberChain::total_rate() const {
  double total = 0.0;
  for (double r : rates_) total += r;
  return total;
}

Vertex GlauberChain::choose(Rng& rng) const {
  const double u = rng.uniform() * total_rate();
  double acc = 0.0;
  Vertex last = 0;
  for (std::size_t v = 0; v < rates_.size(); ++v) {
    if (rates_[v] <= 0.0) continue;
    acc += rates_[v];
    last = static_cast<Vertex>(v);
    if (u < acc) return last;
  }
  return last;
}

void GlauberChain::flip(Vertex v) {
  const int before = state_.spin(v);
  state_.flip(v);
  for (Vertex w : g_.neighbors(v)) field_[static_cast<std::size_t>(w)] -= 2 * before;
  refresh(v);
  for (Vertex w : g_.neighbors(v)) refresh(w);
}

Vertex GlauberChain::step(Rng& rng) {
  time_ += rng.exponential(total_rate());
  const Vertex v = choose(rng);
  flip(v);
  ++events_;
  return v;
}

ConfigPredicate index_set(std::size_t n, const std::vector<std::uint32_t>& configs) {
  if (n > 24) throw CapacityError("index_set: n above 24");
  auto mask = std::make_shared<std::vector<char>>(std::size_t{1} << n, 0);
  for (auto c : configs) mask->at(c) = 1;
  return [mask](const SpinConfig& s) { return (*mask)[s.index()] != 0; };
}

HittingSample simulate_hitting(const MultiGraph& g, const ModelParams& params, const SpinConfig& start,
                               const ConfigPredicate& target, const ConfigPredicate& gate, Rng& rng,
                               const SimCaps& caps) {
  if (!(params.beta >= 0.0)) throw ConfigError("simulate_hitting: beta must be non-negative");
  GlauberChain chain(g, params, start);
  HittingSample sample;
  const auto clock_start = std::chrono::steady_clock::now();
  for (;;) {
    if (chain.events() >= caps.max_events) {
      sample.truncated = true;
      break;
    }
    if (caps.max_seconds > 0.0 && (chain.events() & 0xffff) == 0) {
      const std::chrono::duration<double> spent = std::chrono::steady_clock::now() - clock_start;
      if (spent.count() > caps.max_seconds) {
        sample.truncated = true;
        break;
      }
    }
    chain.step(rng);
    const SpinConfig& s = chain.state();
    if (s == start) {
      ++sample.returns_to_start;
      sample.visited_gate = false;
    }
    if (gate && gate(s)) {
      sample.visited_gate = true;
      sample.visited_gate_any = true;
    }
    if (target(s)) break;
  }
  sample.tau = chain.time();
  sample.events = chain.events();
  return sample;
}

namespace {

// Runs job(k) for k in [0, count) on `workers` threads; rethrows the first error.
template <typename Job>
void parallel_for(std::size_t count, std::size_t workers, Job job) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t k = 0; k < count; ++k) job(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> threads;
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      for (;;) {
        const std::size_t k = next.fetch_add(1);
        if (k >= count) return;
        try {
          job(k);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          next.store(count);
          return;
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

HittingEstimate estimate_mean_hitting(const MultiGraph& g, const ModelParams& params, const SpinConfig& start,
                                      const ConfigPredicate& target, const ConfigPredicate& gate,
                                      std::size_t replicas, std::uint64_t seed, std::size_t workers,
                                      const SimCaps& caps) {
  if (replicas < 2) throw ConfigError("estimate_mean_hitting: need at least 2 replicas");
  HittingEstimate out;
  out.samples.resize(replicas);
  parallel_for(replicas, workers, [&](std::size_t k) {
    Rng rng = Rng::stream(seed, k);
    out.samples[k] = simulate_hitting(g, params, start, target, gate, rng, caps);
  });
  std::vector<double> taus;
  for (const auto& s : out.samples) {
    if (s.truncated) {
      ++out.truncated;
    } else {
      taus.push_back(s.tau);
    }
  }
  out.completed = taus.size();
  if (taus.empty()) throw NumericError("estimate_mean_hitting: every replica hit the event cap");
  if (taus.size() == 1) {
    out.mean = taus.front();
    out.stderr_mean = std::numeric_limits<double>::infinity();
    return out;
  }
  const MeanStderr ms = mean_stderr(taus);
  out.mean = ms.mean;
  out.stderr_mean = ms.stderr_mean;
  return out;
}

GatePassage gate_passage_probability(const MultiGraph& g, const ModelParams& params, const ConfigPredicate& gate,
                                     std::size_t replicas, std::uint64_t seed, std::size_t workers,
                                     const SimCaps& caps) {
  const SpinConfig minus = SpinConfig::all_minus(g.n());
  const auto target = [n = g.n()](const SpinConfig& s) { return s.count() == n; };
  const HittingEstimate est = estimate_mean_hitting(g, params, minus, target, gate, replicas, seed, workers, caps);
  GatePassage out;
  out.completed = est.completed;
  out.truncated = est.truncated;
  std::size_t through = 0;
  std::size_t through_any = 0;
  for (const auto& s : est.samples) {
    if (s.truncated) continue;
    through += s.visited_gate;
    through_any += s.visited_gate_any;
  }
  out.fraction = static_cast<double>(through) / static_cast<double>(out.completed);
  out.fraction_any = static_cast<double>(through_any) / static_cast<double>(out.completed);
  return out;
}

std::vector<PrefactorPoint> prefactor_estimate(const MultiGraph& g, const ModelParams& params, double gamma_star,
                                               const std::vector<double>& betas, std::size_t replicas,
                                               std::uint64_t seed, std::size_t workers, const SimCaps& caps) {
  const SpinConfig minus = SpinConfig::all_minus(g.n());
  const auto target = [n = g.n()](const SpinConfig& s) { return s.count() == n; };
  std::vector<PrefactorPoint> out;
  for (std::size_t i = 0; i < betas.size(); ++i) {
    ModelParams p = params;
    p.beta = betas[i];
    const HittingEstimate est = estimate_mean_hitting(g, p, minus, target, {}, replicas, derive_seed(seed, i), workers, caps);
    PrefactorPoint pt;
    pt.beta = betas[i];
    pt.mean = est.mean;
    pt.stderr_mean = est.stderr_mean;
    const double scale = std::exp(-betas[i] * gamma_star);
    pt.k_hat = scale * est.mean;
    pt.k_stderr = scale * est.stderr_mean;
    out.push_back(pt);
  }
  return out;
}

}  // namespace metastab
