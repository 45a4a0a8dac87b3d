#include "metastab/spin.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include "metastab/error.hpp"

namespace metastab {

SpinConfig SpinConfig::all_plus(std::size_t n) {
  SpinConfig s(n);
  for (std::size_t v = 0; v < n; ++v) s.set(static_cast<Vertex>(v), true);
  return s;
}

SpinConfig SpinConfig::from_vertices(std::size_t n, const std::vector<Vertex>& plus) {
  SpinConfig s(n);
  for (Vertex v : plus) {
    if (v < 0 || static_cast<std::size_t>(v) >= n) throw ConfigError("spin config: vertex out of range");
    s.set(v, true);
  }
  return s;
}

SpinConfig SpinConfig::from_index(std::size_t n, std::uint64_t index) {
  if (n > 63) throw CapacityError("spin config: index form needs n <= 63");
  if (n < 63 && (index >> n) != 0) throw ConfigError("spin config: index has bits beyond n");
  SpinConfig s(n);
  if (n > 0) s.words_[0] = index;
  return s;
}

void SpinConfig::set(Vertex v, bool up) {
  const std::uint64_t bit = std::uint64_t{1} << (v & 63);
  auto& word = words_[static_cast<std::size_t>(v) >> 6];
  word = up ? (word | bit) : (word & ~bit);
}

std::size_t SpinConfig::count() const {
  std::size_t c = 0;
  for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

SpinConfig SpinConfig::complement() const {
  SpinConfig out(n_);
  for (std::size_t i = 0; i < words_.size(); ++i) out.words_[i] = ~words_[i];
  if (n_ % 64 != 0) out.words_.back() &= (std::uint64_t{1} << (n_ % 64)) - 1;
  return out;
}

std::vector<Vertex> SpinConfig::plus_vertices() const {
  std::vector<Vertex> out;
  for (std::size_t v = 0; v < n_; ++v) {
    if (plus(static_cast<Vertex>(v))) out.push_back(static_cast<Vertex>(v));
  }
  return out;
}

std::uint64_t SpinConfig::index() const {
  if (n_ > 63) throw CapacityError("spin config: index form needs n <= 63");
  return words_.empty() ? 0 : words_[0];
}

std::string SpinConfig::to_string() const {
  std::ostringstream out;
  if (n_ <= 63) {
    out << std::hex << index();
    return out.str();
  }
  out << '[';
  bool first = true;
  for (Vertex v : plus_vertices()) {
    if (!first) out << ',';
    out << v;
    first = false;
  }
  out << ']';
  return out.str();
}

SpinConfig SpinConfig::parse(std::size_t n, const std::string& text) {
  if (!text.empty() && text.front() == '[') {
    if (text.back() != ']') throw ConfigError("spin config: unterminated vertex list '" + text + "'");
    std::vector<Vertex> plus;
    std::string body = text.substr(1, text.size() - 2);
    std::replace(body.begin(), body.end(), ',', ' ');
    std::istringstream in(body);
    long long v = 0;
    while (in >> v) plus.push_back(static_cast<Vertex>(v));
    if (!in.eof()) throw ConfigError("spin config: bad vertex list '" + text + "'");
    return from_vertices(n, plus);
  }
  std::size_t used = 0;
  std::uint64_t index = 0;
  try {
    index = std::stoull(text, &used, 16);
  } catch (const std::exception&) {
    throw ConfigError("spin config: bad hex mask '" + text + "'");
  }
  if (used != text.size()) throw ConfigError("spin config: bad hex mask '" + text + "'");
  return from_index(n, index);
}

void ModelParams::validate(bool allow_zero_field) const {
  if (!(J > 0.0) || !std::isfinite(J)) throw ConfigError("model: J must be positive");
  if (!std::isfinite(h) || h < 0.0 || (h == 0.0 && !allow_zero_field)) {
    throw ConfigError("model: h must be positive");
  }
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ConfigError("model: beta must be >= 0");
}

}  // namespace metastab
