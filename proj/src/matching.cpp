#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <set>

#include "metastab/error.hpp"
#include "metastab/graph.hpp"

namespace metastab {

StubMatching StubMatching::from_pairs(std::size_t points, std::span<const std::pair<Stub, Stub>> pairs) {
  StubMatching m;
  m.partner_.assign(points, -1);
  for (const auto& [a, b] : pairs) {
    const auto limit = static_cast<Stub>(points);
    if (a < 0 || b < 0 || a >= limit || b >= limit || a == b) {
      throw ConfigError("matching: invalid pair (" + std::to_string(a) + ", " + std::to_string(b) + ")");
    }
    if (m.partner(a) != -1 || m.partner(b) != -1) throw ConfigError("matching: point used twice");
    m.link(a, b);
  }
  if (!m.is_perfect()) throw ConfigError("matching: not perfect");
  return m;
}

void StubMatching::relocate(Stub u) {
  const auto m2 = static_cast<Stub>(points());
  if (u < 0 || u > m2) throw ConfigError("relocate: choice out of range");
  partner_.resize(partner_.size() + 2);
  if (u == m2) {
    link(m2, m2 + 1);
    return;
  }
  const Stub old = partner(u);
  link(u, m2 + 1);
  link(old, m2);
}

void StubMatching::insert_pair(Stub u1, Stub u2) {
  const auto m2 = static_cast<Stub>(points());
  if (u1 < 0 || u1 >= m2 || u2 < 0 || u2 > m2) throw ConfigError("insert_pair: choice out of range");
  const Stub p1 = partner(u1);
  const Stub p2 = u2 < m2 ? partner(u2) : -1;
  partner_.resize(partner_.size() + 2);
  if (u2 == m2) {
    link(m2, m2 + 1);
  } else if (u1 == u2) {
    link(m2 + 1, u2);
    link(m2, p2);
  } else if (p1 == u2) {
    link(m2, u1);
    link(m2 + 1, u2);
  } else {
    link(m2, u1);
    link(m2 + 1, u2);
    link(p1, p2);
  }
}

std::size_t StubMatching::internal_count(std::size_t x) const {
  x = std::min(x, points());
  std::size_t count = 0;
  for (std::size_t s = 0; s < x; ++s) {
    if (static_cast<std::size_t>(partner_[s]) < x) ++count;
  }
  return count;
}

std::vector<std::pair<Stub, Stub>> StubMatching::pairs() const {
  std::vector<std::pair<Stub, Stub>> out;
  out.reserve(points() / 2);
  for (std::size_t s = 0; s < points(); ++s) {
    const auto a = static_cast<Stub>(s);
    if (a < partner_[s]) out.emplace_back(a, partner_[s]);
  }
  return out;
}

bool StubMatching::is_perfect() const {
  for (std::size_t s = 0; s < points(); ++s) {
    const Stub t = partner_[s];
    if (t < 0 || static_cast<std::size_t>(t) >= points() || t == static_cast<Stub>(s)) return false;
    if (partner_[static_cast<std::size_t>(t)] != static_cast<Stub>(s)) return false;
  }
  return true;
}

StubMatching uniform_matching(std::size_t points, Rng& rng) {
  if (points % 2 != 0) throw ConfigError("uniform_matching: odd number of points");
  std::vector<Stub> order(points);
  std::iota(order.begin(), order.end(), Stub{0});
  for (std::size_t i = points; i > 1; --i) {
    std::swap(order[i - 1], order[rng.below(i)]);
  }
  std::vector<std::pair<Stub, Stub>> pairs;
  pairs.reserve(points / 2);
  for (std::size_t i = 0; i < points; i += 2) pairs.emplace_back(order[i], order[i + 1]);
  return StubMatching::from_pairs(points, pairs);
}

void dynamic_match_step(StubMatching& matching, Rng& rng) {
  matching.relocate(static_cast<Stub>(rng.below(matching.points() + 1)));
}

void dynamic_pair_step(StubMatching& matching, Rng& rng) {
  const std::size_t m2 = matching.points();
  if (m2 == 0) {
    matching.relocate(0);
    return;
  }
  const auto u1 = static_cast<Stub>(rng.below(m2));
  const auto u2 = static_cast<Stub>(rng.below(m2 + 1));
  matching.insert_pair(u1, u2);
}

// ---------------------------------------------------------------------------

namespace {

std::uint64_t edge_key(Vertex x, Vertex y) {
  if (x > y) std::swap(x, y);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(x)) << 32) |
         static_cast<std::uint32_t>(y);
}

// Choice on the larger side given the smaller side's draw. Index small_top
// (the "pair the new points" value for u2) maps to big_top; the extra indices
// [small_top, big_top) are reached by the redraw.
Stub coupled_choice(Stub small_draw, std::size_t small_range, std::size_t big_range, bool top_is_special,
                    Rng& rng, std::size_t& redraws) {
  const std::size_t extra = big_range - small_range;
  if (extra > 0 && rng.uniform() * static_cast<double>(big_range) < static_cast<double>(extra)) {
    ++redraws;
    const std::size_t first_extra = top_is_special ? small_range - 1 : small_range;
    return static_cast<Stub>(first_extra + rng.below(extra));
  }
  if (top_is_special && static_cast<std::size_t>(small_draw) == small_range - 1) {
    return static_cast<Stub>(big_range - 1);
  }
  return small_draw;
}

}  // namespace

CoupledCM::CoupledCM(std::vector<int> degrees_a, StubMatching matching_a, std::vector<int> degrees_b,
                     StubMatching matching_b) {
  const auto init = [](Side& side, std::vector<int> degrees, StubMatching matching) {
    const auto owners = stub_owners(degrees);
    if (owners.size() != matching.points()) throw ConfigError("coupled CM: matching does not fit degrees");
    if (owners.empty()) throw ConfigError("coupled CM: empty base graph");
    if (!matching.is_perfect()) throw ConfigError("coupled CM: base matching not perfect");
    side.base_degrees = std::move(degrees);
    side.matching = std::move(matching);
    side.owner_label = owners;
  };
  init(a_, std::move(degrees_a), std::move(matching_a));
  init(b_, std::move(degrees_b), std::move(matching_b));
  base_labels_ = std::max(a_.base_degrees.size(), b_.base_degrees.size());
  for (const auto& [s, t] : a_.matching.pairs()) {
    add_edge_balance(a_.owner_label[static_cast<std::size_t>(s)], a_.owner_label[static_cast<std::size_t>(t)], 1, 1);
  }
  for (const auto& [s, t] : b_.matching.pairs()) {
    add_edge_balance(b_.owner_label[static_cast<std::size_t>(s)], b_.owner_label[static_cast<std::size_t>(t)], -1, 1);
  }
}

CoupledCM CoupledCM::independent(const DegreeSequence& degrees, Rng& rng) {
  std::vector<int> d(degrees.degrees().begin(), degrees.degrees().end());
  const auto points = static_cast<std::size_t>(degrees.total());
  StubMatching a = uniform_matching(points, rng);
  StubMatching b = uniform_matching(points, rng);
  return CoupledCM(d, std::move(a), d, std::move(b));
}

CoupledCM CoupledCM::identical(const DegreeSequence& degrees, Rng& rng) {
  std::vector<int> d(degrees.degrees().begin(), degrees.degrees().end());
  StubMatching a = uniform_matching(static_cast<std::size_t>(degrees.total()), rng);
  return CoupledCM(d, a, d, a);
}

void CoupledCM::add_edge_balance(Vertex x, Vertex y, int side_sign, int delta) {
  const std::uint64_t key = edge_key(x, y);
  auto it = balance_.find(key);
  const long long before = it == balance_.end() ? 0 : it->second;
  const long long after = before + static_cast<long long>(side_sign) * delta;
  mismatch_ = mismatch_ + static_cast<std::size_t>(std::llabs(after)) - static_cast<std::size_t>(std::llabs(before));
  if (after == 0) {
    if (it != balance_.end()) balance_.erase(it);
  } else if (it == balance_.end()) {
    balance_.emplace(key, after);
  } else {
    it->second = after;
  }
}

void CoupledCM::apply_insert(Side& side, int side_sign, Stub u1, Stub u2) {
  StubMatching& m = side.matching;
  const auto m2 = static_cast<Stub>(m.points());
  std::set<Stub> touched{u1, m.partner(u1)};
  if (u2 < m2) {
    touched.insert(u2);
    touched.insert(m.partner(u2));
  }
  const auto collect = [&](const std::set<Stub>& stubs) {
    std::set<std::pair<Stub, Stub>> out;
    for (Stub s : stubs) {
      const Stub t = m.partner(s);
      out.emplace(std::min(s, t), std::max(s, t));
    }
    return out;
  };
  const auto label = [&](Stub s) { return side.owner_label[static_cast<std::size_t>(s)]; };

  const auto before = collect(touched);
  m.insert_pair(u1, u2);
  touched.insert(m2);
  touched.insert(m2 + 1);
  const auto after = collect(touched);

  for (const auto& [s, t] : before) {
    if (!after.contains({s, t})) add_edge_balance(label(s), label(t), side_sign, -1);
  }
  for (const auto& [s, t] : after) {
    if (!before.contains({s, t})) add_edge_balance(label(s), label(t), side_sign, 1);
  }
}

void CoupledCM::grow(std::span<const int> new_degrees, Rng& rng) {
  std::vector<Vertex> labels;
  for (int d : new_degrees) {
    if (d < 1) throw ConfigError("coupled CM: added degrees must be >= 1");
    const auto label = static_cast<Vertex>(base_labels_ + added_.size());
    added_.push_back(d);
    labels.insert(labels.end(), static_cast<std::size_t>(d), label);
  }
  if (labels.size() % 2 != 0) throw ConfigError("coupled CM: added degrees must have an even total");

  for (std::size_t i = 0; i < labels.size(); i += 2) {
    const std::size_t pa = a_.matching.points();
    const std::size_t pb = b_.matching.points();
    const bool a_small = pa <= pb;
    const std::size_t small = std::min(pa, pb);
    const std::size_t big = std::max(pa, pb);

    const auto s1 = static_cast<Stub>(rng.below(small));
    const auto s2 = static_cast<Stub>(rng.below(small + 1));
    const Stub b1 = coupled_choice(s1, small, big, false, rng, redraws_);
    const Stub b2 = coupled_choice(s2, small + 1, big + 1, true, rng, redraws_);

    for (Side* side : {&a_, &b_}) {
      side->owner_label.push_back(labels[i]);
      side->owner_label.push_back(labels[i + 1]);
    }
    apply_insert(a_, 1, a_small ? s1 : b1, a_small ? s2 : b2);
    apply_insert(b_, -1, a_small ? b1 : s1, a_small ? b2 : s2);
  }
}

std::size_t CoupledCM::label_count() const { return base_labels_ + added_.size(); }

MultiGraph CoupledCM::graph_a() const {
  MultiGraph g(label_count());
  for (const auto& [s, t] : a_.matching.pairs()) {
    g.add_edge(a_.owner_label[static_cast<std::size_t>(s)], a_.owner_label[static_cast<std::size_t>(t)]);
  }
  return g;
}

MultiGraph CoupledCM::graph_b() const {
  MultiGraph g(label_count());
  for (const auto& [s, t] : b_.matching.pairs()) {
    g.add_edge(b_.owner_label[static_cast<std::size_t>(s)], b_.owner_label[static_cast<std::size_t>(t)]);
  }
  return g;
}

std::size_t CoupledCM::stub_mismatch() const {
  const std::size_t points = std::min(a_.matching.points(), b_.matching.points());
  std::size_t count = 0;
  for (std::size_t s = 0; s < points; ++s) {
    const auto sa = static_cast<std::size_t>(a_.matching.partner(static_cast<Stub>(s)));
    const auto sb = static_cast<std::size_t>(b_.matching.partner(static_cast<Stub>(s)));
    if (a_.owner_label[sa] != b_.owner_label[sb]) ++count;
  }
  return count;
}

}  // namespace metastab
