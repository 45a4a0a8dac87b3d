#pragma once

#include <cstdint>
#include <random>

namespace metastab {

std::uint64_t splitmix64(std::uint64_t x);

// Seed for stream `index` of a master seed. Replica k of an experiment uses
// derive_seed(master, k); nested streams chain the derivation.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

// mt19937_64 with hand-written samplers, so a seed produces the same stream
// under every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng stream(std::uint64_t master, std::uint64_t index) {
    return Rng(derive_seed(master, index));
  }

  std::uint64_t next() { return engine_(); }

  // Uniform on {0, ..., n-1}; n > 0.
  std::uint64_t below(std::uint64_t n);

  // Uniform on [0, 1) with 53 random bits.
  double uniform();

  // Uniform on (0, 1].
  double uniform_open_left() { return 1.0 - uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  double exponential(double rate);

 private:
  std::mt19937_64 engine_;
};

}  // namespace metastab
