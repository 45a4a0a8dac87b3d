#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "metastab/graph.hpp"
#include "metastab/spin.hpp"

namespace metastab {

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

// Key-value settings for one experiment. Values come from an INI-style file
// (section per experiment, [common] shared) and are overridden by flags.
// Unknown keys are rejected.
class ExperimentConfig {
 public:
  ExperimentConfig() = default;
  explicit ExperimentConfig(std::string kind);

  const std::string& kind() const { return kind_; }

  void set(const std::string& key, const std::string& value, const std::string& origin = "flag");
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, std::string>& values() const { return values_; }

  std::string get(const std::string& key, const std::string& fallback) const;
  std::string require(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<long long> get_ints(const std::string& key, const std::vector<long long>& fallback) const;

  // Seed present, beta grid strictly increasing, referenced files readable.
  void validate() const;

  static const std::vector<std::string>& kinds();
  static bool known_key(const std::string& key);

 private:
  [[noreturn]] void fail(const std::string& key, const std::string& what) const;

  std::string kind_;
  std::map<std::string, std::string> values_;
  std::map<std::string, std::string> origin_;
};

// Reads the [common] and [<kind>] sections of a config file into `config`.
void load_config_file(const std::string& path, ExperimentConfig& config);

// ---------------------------------------------------------------------------
// Graph specifications
// ---------------------------------------------------------------------------

// "complete 4", "torus 4", "hypercube 3", "file <path>", "cm <distribution> <n>",
// "cmfile <degree file>", "er <n> <p>".
struct GraphSpec {
  enum class Kind { reference, file, cm, cm_file, er };
  Kind kind = Kind::reference;
  ReferenceGraph reference;
  std::string path;
  DegreeDistribution distribution;
  std::size_t n = 0;
  double p = 0;

  static GraphSpec parse(const std::string& text);
  bool random() const { return kind == Kind::cm || kind == Kind::cm_file || kind == Kind::er; }
};

struct BuiltGraph {
  MultiGraph graph;
  std::optional<DegreeSequence> degrees;  // set for configuration-model graphs
};

// CM graphs number vertices in ascending degree order.
BuiltGraph build_graph(const GraphSpec& spec, std::uint64_t seed, bool allow_low_degree = false);

// ---------------------------------------------------------------------------
// Results and output
// ---------------------------------------------------------------------------

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<nlohmann::json>> rows;
  // plotdata: one "x y" block per distinct series value.
  std::string plot_x;
  std::string plot_y;
  std::string plot_series;

  void add(std::vector<nlohmann::json> row);
};

struct ExperimentResult {
  std::vector<Table> tables;
  std::vector<std::pair<std::string, std::string>> text_files;  // file name, content
  nlohmann::json summary = nlohmann::json::object();
  std::vector<std::string> warnings;
};

enum class Format { csv, json, plotdata };
Format parse_format(const std::string& text);
std::string format_extension(Format format);

// Writes one table in the given format.
void emit_report(std::ostream& out, const Table& table, Format format);
std::string format_cell(const nlohmann::json& value);

struct RunManifest {
  nlohmann::json json;
};

std::uint64_t fnv1a64(const std::string& bytes);

// Dispatches to the experiment named by config.kind(), writes every output
// under the "out" directory and returns the manifest (also written there).
RunManifest run_experiment(const ExperimentConfig& config);

// The experiment body without file output.
ExperimentResult execute(const ExperimentConfig& config);

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

ExperimentResult generate_experiment(const ExperimentConfig& config);
ExperimentResult landscape_experiment(const ExperimentConfig& config);
ExperimentResult gates_experiment(const ExperimentConfig& config);
ExperimentResult bounds_experiment(const ExperimentConfig& config);
ExperimentResult simulate_experiment(const ExperimentConfig& config);

struct CouplingRow {
  std::size_t t = 0;
  double mismatch_fraction = 0;  // fraction of seeds with G != G'
  double mean_mismatch = 0;      // mean |E delta E'|
  double edge_rate = 0;          // mean |E delta E'| / total edges
};

struct ExactPairRow {
  std::uint64_t seed = 0;
  std::size_t t = 0;
  std::size_t n = 0;
  std::size_t mismatch = 0;
  double gamma_a = 0;
  double gamma_b = 0;
  double bound = 0;
  bool violated = false;
};

struct CouplingDecay {
  std::vector<CouplingRow> rows;
  double slope = 0;       // log-log slope of mismatch_fraction over t
  bool slope_defined = false;
  double edge_slope = 0;  // log-log slope of edge_rate
  std::vector<ExactPairRow> exact_pairs;
};

// Independent CM bases on n vertices, grown by shared choices; t grid of
// added vertex counts, one run per seed covering the whole grid.
CouplingDecay coupling_decay(std::size_t n, const DegreeDistribution& dist, const std::vector<std::size_t>& t_grid,
                             std::size_t seeds, std::uint64_t master, double J, double h,
                             std::size_t exact_base = 0, std::size_t exact_seeds = 0, std::size_t workers = 1);
ExperimentResult couple_experiment(const ExperimentConfig& config);

struct MomentRow {
  std::size_t x = 0;
  std::size_t t = 0;
  std::size_t replicas = 0;
  double mean = 0;
  double mean_se = 0;
  double mean_exact = 0;
  double second = 0;
  double second_se = 0;
  double second_exact = 0;
};

double z_mean_exact(std::size_t x, std::size_t t);
double z_second_exact(std::size_t x, std::size_t t);
// Variance of w_{x,t} = z_{x,t} / (x + 2t) from the closed form, t >= 1.
double w_variance_exact(std::size_t x, std::size_t t);

MomentRow matching_moments(std::size_t x, std::size_t t, std::size_t replicas, std::uint64_t seed);

// Max over even x of |zbar_{x,(M-x)/2} - x(M-x)/(M-1)| for one dynamic
// matching of M points.
double max_cross_deviation(std::size_t M, std::uint64_t seed);

struct UniformityCheck {
  std::size_t runs = 0;
  std::size_t cells = 0;
  double chi_square = 0;
  double p_value = 0;
};

// Chi-square of the matching produced from scratch by dynamic steps (static:
// uniform_matching) over all (points-1)!! matchings.
UniformityCheck matching_uniformity(std::size_t points, std::size_t runs, std::uint64_t seed, bool dynamic);

ExperimentResult moments_experiment(const ExperimentConfig& config);

struct ErConcentration {
  std::size_t n = 0;
  double p = 0;
  std::size_t sigma_size = 0;
  std::size_t samples = 0;
  std::size_t within = 0;          // ratios inside [0.9, 1.1], one graph
  std::size_t within_fresh = 0;    // same with a fresh graph per sample
  std::vector<double> ratios;
};

ErConcentration er_concentration(std::size_t n, double p, std::size_t sigma_size, std::size_t samples,
                                 std::uint64_t seed);
ExperimentResult er_check_experiment(const ExperimentConfig& config);

ExperimentResult scaling_experiment(const ExperimentConfig& config);

}  // namespace metastab
