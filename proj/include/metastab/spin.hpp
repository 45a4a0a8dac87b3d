#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "metastab/graph.hpp"

namespace metastab {

// Spin assignment stored as the set of +1 vertices (bitset). The empty set is
// all minus, the full set all plus.
class SpinConfig {
 public:
  SpinConfig() = default;
  explicit SpinConfig(std::size_t n) : n_(n), words_((n + 63) / 64, 0) {}

  static SpinConfig all_minus(std::size_t n) { return SpinConfig(n); }
  static SpinConfig all_plus(std::size_t n);
  static SpinConfig from_vertices(std::size_t n, const std::vector<Vertex>& plus);
  // Bit v of `index` is the spin of vertex v; n <= 63.
  static SpinConfig from_index(std::size_t n, std::uint64_t index);

  std::size_t n() const { return n_; }
  bool plus(Vertex v) const { return (words_[static_cast<std::size_t>(v) >> 6] >> (v & 63)) & 1U; }
  int spin(Vertex v) const { return plus(v) ? 1 : -1; }
  void set(Vertex v, bool up);
  void flip(Vertex v) { words_[static_cast<std::size_t>(v) >> 6] ^= std::uint64_t{1} << (v & 63); }

  std::size_t count() const;
  SpinConfig complement() const;
  std::vector<Vertex> plus_vertices() const;
  std::uint64_t index() const;

  // Lowercase hex bitmask for n <= 63, otherwise the sorted +1 vertex list
  // "[v1,v2,...]".
  std::string to_string() const;
  static SpinConfig parse(std::size_t n, const std::string& text);

  friend bool operator==(const SpinConfig&, const SpinConfig&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

struct ModelParams {
  double J = 1.0;
  double h = 0.5;
  double beta = 1.0;

  // J > 0, beta >= 0, and h > 0 (h >= 0 when allow_zero_field).
  void validate(bool allow_zero_field = false) const;
};

}  // namespace metastab
