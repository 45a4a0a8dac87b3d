#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "metastab/error.hpp"
#include "metastab/experiments.hpp"

namespace metastab {

namespace {

const std::vector<std::string> kKnownKeys = {
    "graph",   "J",          "h",        "beta",         "replicas",  "seed",       "cap_events", "cap_seconds",
    "workers", "out",        "format",   "n",            "t",         "x",          "seeds",      "samples",
    "p",       "sigma_size", "slack_c",  "literal",      "override_cap", "v_table", "distribution", "degrees",
    "M",       "ks_scale",   "exact_base", "exact_seeds", "allow_low_degree", "runs", "small_n", "small_p"};

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& text) {
  std::string s = text;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string item;
  while (in >> item) out.push_back(item);
  return out;
}

}  // namespace

ExperimentConfig::ExperimentConfig(std::string kind) : kind_(std::move(kind)) {
  const auto& all = kinds();
  if (std::find(all.begin(), all.end(), kind_) == all.end()) {
    throw ConfigError("unknown experiment '" + kind_ + "'");
  }
}

const std::vector<std::string>& ExperimentConfig::kinds() {
  static const std::vector<std::string> all = {"generate", "landscape", "gates",    "bounds", "simulate",
                                               "couple",   "moments",   "er-check", "scaling"};
  return all;
}

bool ExperimentConfig::known_key(const std::string& key) {
  return std::find(kKnownKeys.begin(), kKnownKeys.end(), key) != kKnownKeys.end();
}

void ExperimentConfig::set(const std::string& key, const std::string& value, const std::string& origin) {
  if (!known_key(key)) throw ConfigError(origin + ": unknown key '" + key + "'");
  values_[key] = value;
  origin_[key] = origin;
}

void ExperimentConfig::fail(const std::string& key, const std::string& what) const {
  const auto it = origin_.find(key);
  const std::string where = it == origin_.end() ? "config" : it->second;
  throw ConfigError(where + ": field '" + key + "': " + what);
}

std::string ExperimentConfig::get(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

std::string ExperimentConfig::require(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end() || it->second.empty()) throw ConfigError("missing required field '" + key + "'");
  return it->second;
}

double ExperimentConfig::get_double(const std::string& key, double fallback) const {
  if (!has(key)) return fallback;
  const std::string& text = values_.at(key);
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (trim(text.substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  fail(key, "expected a number, got '" + text + "'");
}

long long ExperimentConfig::get_int(const std::string& key, long long fallback) const {
  if (!has(key)) return fallback;
  const std::string& text = values_.at(key);
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (trim(text.substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  fail(key, "expected an integer, got '" + text + "'");
}

std::uint64_t ExperimentConfig::get_u64(const std::string& key, std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  const std::string& text = values_.at(key);
  try {
    std::size_t used = 0;
    if (!text.empty() && text.front() != '-') {
      const std::uint64_t v = std::stoull(text, &used);
      if (trim(text.substr(used)).empty()) return v;
    }
  } catch (const std::exception&) {
  }
  fail(key, "expected an unsigned integer, got '" + text + "'");
}

bool ExperimentConfig::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string& text = values_.at(key);
  if (text == "1" || text == "true" || text == "yes" || text == "on") return true;
  if (text == "0" || text == "false" || text == "no" || text == "off") return false;
  fail(key, "expected a boolean, got '" + text + "'");
}

std::vector<double> ExperimentConfig::get_doubles(const std::string& key, const std::vector<double>& fallback) const {
  if (!has(key)) return fallback;
  std::vector<double> out;
  for (const auto& item : split_list(values_.at(key))) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) fail(key, "bad list entry '" + item + "'");
    } catch (const std::logic_error&) {
      fail(key, "bad list entry '" + item + "'");
    }
  }
  return out;
}

std::vector<long long> ExperimentConfig::get_ints(const std::string& key, const std::vector<long long>& fallback) const {
  if (!has(key)) return fallback;
  std::vector<long long> out;
  for (const auto& item : split_list(values_.at(key))) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoll(item, &used));
      if (used != item.size()) fail(key, "bad list entry '" + item + "'");
    } catch (const std::logic_error&) {
      fail(key, "bad list entry '" + item + "'");
    }
  }
  return out;
}

void ExperimentConfig::validate() const {
  if (!has("seed")) throw ConfigError("missing required field 'seed' (all randomness derives from it)");
  (void)get_u64("seed", 0);
  const auto betas = get_doubles("beta", {});
  for (std::size_t i = 1; i < betas.size(); ++i) {
    if (!(betas[i] > betas[i - 1])) fail("beta", "grid must be strictly increasing");
  }
  for (double b : betas) {
    if (!(b >= 0.0)) fail("beta", "values must be >= 0");
  }
  if (has("graph")) {
    const GraphSpec spec = GraphSpec::parse(get("graph", ""));
    if ((spec.kind == GraphSpec::Kind::file || spec.kind == GraphSpec::Kind::cm_file) &&
        !std::filesystem::is_regular_file(spec.path)) {
      fail("graph", "file not found: " + spec.path);
    }
  }
  if (has("degrees") && !std::filesystem::is_regular_file(get("degrees", ""))) {
    fail("degrees", "file not found: " + get("degrees", ""));
  }
  if (has("format")) (void)parse_format(get("format", ""));
  if (get_int("workers", 1) < 1) fail("workers", "must be >= 1");
}

void load_config_file(const std::string& path, ExperimentConfig& config) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::string line;
  std::string section;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string where = path + ":" + std::to_string(number);
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      const auto& all = ExperimentConfig::kinds();
      if (section != "common" && std::find(all.begin(), all.end(), section) == all.end()) {
        throw ConfigError(where + ": unknown section '" + section + "'");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    if (section.empty()) throw ConfigError(where + ": key outside of a section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!ExperimentConfig::known_key(key)) throw ConfigError(where + ": unknown key '" + key + "'");
    if (section == "common" || section == config.kind()) config.set(key, value, where);
  }
}

GraphSpec GraphSpec::parse(const std::string& text) {
  std::istringstream in(text);
  std::string head;
  in >> head;
  GraphSpec spec;
  if (head == "complete" || head == "torus" || head == "hypercube") {
    spec.kind = Kind::reference;
    spec.reference = ReferenceGraph::parse(text);
    return spec;
  }
  if (head == "file" || head == "cmfile") {
    spec.kind = head == "file" ? Kind::file : Kind::cm_file;
    std::getline(in, spec.path);
    spec.path = trim(spec.path);
    if (spec.path.empty()) throw ConfigError("graph: missing path in '" + text + "'");
    return spec;
  }
  if (head == "cm") {
    // Distribution words followed by n.
    std::vector<std::string> words;
    std::string w;
    while (in >> w) words.push_back(w);
    if (words.size() < 3) throw ConfigError("graph: expected 'cm <distribution> <n>' got '" + text + "'");
    std::string dist;
    for (std::size_t i = 0; i + 1 < words.size(); ++i) dist += (i ? " " : "") + words[i];
    spec.kind = Kind::cm;
    spec.distribution = DegreeDistribution::parse(dist);
    long long n = 0;
    try {
      n = std::stoll(words.back());
    } catch (const std::exception&) {
      throw ConfigError("graph: bad vertex count in '" + text + "'");
    }
    if (n < 1) throw ConfigError("graph: vertex count must be >= 1");
    spec.n = static_cast<std::size_t>(n);
    return spec;
  }
  if (head == "er") {
    long long n = 0;
    if (!(in >> n >> spec.p) || n < 1) throw ConfigError("graph: expected 'er <n> <p>' got '" + text + "'");
    spec.kind = Kind::er;
    spec.n = static_cast<std::size_t>(n);
    return spec;
  }
  throw ConfigError("graph: unknown specification '" + text + "'");
}

BuiltGraph build_graph(const GraphSpec& spec, std::uint64_t seed, bool allow_low_degree) {
  BuiltGraph out;
  switch (spec.kind) {
    case GraphSpec::Kind::reference:
      out.graph = build_reference_graph(spec.reference);
      break;
    case GraphSpec::Kind::file:
      out.graph = read_edge_list_file(spec.path);
      break;
    case GraphSpec::Kind::cm: {
      Rng degree_rng = Rng::stream(seed, 0);
      out.degrees = sample_degrees(spec.distribution, spec.n, degree_rng);
      Rng match_rng = Rng::stream(seed, 1);
      out.graph = build_cm_static(*out.degrees, match_rng, {allow_low_degree});
      break;
    }
    case GraphSpec::Kind::cm_file: {
      out.degrees = read_degree_file(spec.path);
      Rng match_rng = Rng::stream(seed, 1);
      out.graph = build_cm_static(*out.degrees, match_rng, {allow_low_degree});
      break;
    }
    case GraphSpec::Kind::er: {
      Rng rng = Rng::stream(seed, 0);
      out.graph = build_er(spec.n, spec.p, rng);
      break;
    }
  }
  return out;
}

}  // namespace metastab
