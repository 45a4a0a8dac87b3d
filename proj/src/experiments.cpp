#include "metastab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

#include "metastab/bounds.hpp"
#include "metastab/dynamics.hpp"
#include "metastab/energy.hpp"
#include "metastab/error.hpp"
#include "metastab/landscape.hpp"

namespace metastab {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Common {
  double J;
  double h;
  std::uint64_t seed;
  std::size_t workers;
  SimCaps caps;
  LandscapeOptions landscape;
};

Common common(const ExperimentConfig& config) {
  Common c;
  c.J = config.get_double("J", 1.0);
  c.h = config.get_double("h", 0.5);
  c.seed = config.get_u64("seed", 0);
  c.workers = static_cast<std::size_t>(config.get_int("workers", 1));
  c.caps.max_events = config.get_u64("cap_events", c.caps.max_events);
  c.caps.max_seconds = config.get_double("cap_seconds", 0.0);
  c.landscape.override_cap = config.get_bool("override_cap", false);
  return c;
}

std::size_t positive(const ExperimentConfig& config, const std::string& key, long long fallback) {
  const long long v = config.get_int(key, fallback);
  if (v < 1) throw ConfigError("field '" + key + "' must be >= 1");
  return static_cast<std::size_t>(v);
}

json num(double v) { return std::isfinite(v) ? json(v) : json(format_cell(json(v))); }

BuiltGraph graph_of(const ExperimentConfig& config, const Common& c) {
  const GraphSpec spec = GraphSpec::parse(config.require("graph"));
  return build_graph(spec, c.seed, config.get_bool("allow_low_degree", false));
}

DegreeSequence sorted_degrees(const MultiGraph& g) { return DegreeSequence(g.degree_vector()); }

// Uniform random k-subset of {0..n-1} as a spin configuration.
SpinConfig random_subset(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<Vertex> ids(n);
  std::iota(ids.begin(), ids.end(), Vertex{0});
  for (std::size_t i = 0; i < k; ++i) std::swap(ids[i], ids[i + rng.below(n - i)]);
  ids.resize(k);
  return SpinConfig::from_vertices(n, ids);
}

}  // namespace

// ---------------------------------------------------------------------------

ExperimentResult generate_experiment(const ExperimentConfig& config) {
  const Common c = common(config);
  const BuiltGraph built = graph_of(config, c);
  ExperimentResult result;
  std::ostringstream edges;
  write_edge_list(edges, built.graph);
  result.text_files.emplace_back("graph.edges", edges.str());
  const DegreeSequence degrees = built.degrees ? *built.degrees : sorted_degrees(built.graph);
  std::ostringstream deg;
  write_degree_file(deg, degrees);
  result.text_files.emplace_back("degrees.txt", deg.str());

  Table table{"vertices", {"vertex", "degree", "self_loops"}, {}, "vertex", "degree", ""};
  std::size_t loops = 0;
  for (std::size_t v = 0; v < built.graph.n(); ++v) {
    const auto vid = static_cast<Vertex>(v);
    loops += static_cast<std::size_t>(built.graph.self_loops(vid));
    table.add({v, built.graph.degree(vid), built.graph.self_loops(vid)});
  }
  result.tables.push_back(std::move(table));
  result.summary = {{"n", built.graph.n()},
                    {"edges", built.graph.edge_count()},
                    {"self_loops", loops},
                    {"connected", is_connected(built.graph)}};
  return result;
}

ExperimentResult landscape_experiment(const ExperimentConfig& config) {
  const Common c = common(config);
  const BuiltGraph built = graph_of(config, c);
  const ModelParams params{c.J, c.h, 1.0};
  const EnergyLandscape land(built.graph, params, c.landscape);
  const LandscapeReport report = classify_states(land);
  const SortedPath path = sorted_flip_path(built.graph, params);

  ExperimentResult result;
  std::ostringstream text;
  write_landscape_report(text, report);
  text << "path_height: " << path.height << '\n';
  text << "path_argmax: " << path.argmax << '\n';
  result.text_files.emplace_back("landscape.txt", text.str());
  if (config.get_bool("v_table", false)) {
    std::ostringstream v;
    write_v_table(v, land, report.v_table);
    result.text_files.emplace_back("v_table.csv", v.str());
  }

  Table table{"landscape", {"quantity", "value"}, {}, "", "", ""};
  table.add({"n", report.n});
  table.add({"gamma_star", num(report.gamma_star)});
  table.add({"energy_minus", num(report.energy_minus)});
  table.add({"energy_plus", num(report.energy_plus)});
  table.add({"v_minus", num(report.v_minus)});
  table.add({"v_meta", num(report.v_meta)});
  table.add({"omega_meta_size", report.omega_meta.size()});
  table.add({"h_holds", report.h_holds});
  table.add({"path_height", num(path.height)});
  result.tables.push_back(std::move(table));

  Table profile{"path_profile", {"m", "energy_rise"}, {}, "m", "energy_rise", ""};
  for (std::size_t m = 0; m < path.profile.size(); ++m) profile.add({m, num(path.profile[m])});
  result.tables.push_back(std::move(profile));

  result.summary = {{"gamma_star", report.gamma_star},
                    {"h_holds", report.h_holds},
                    {"v_minus", report.v_minus},
                    {"omega_meta_size", report.omega_meta.size()},
                    {"path_height", path.height}};
  if (!report.h_holds) result.warnings.push_back("hypothesis (H) fails on this instance");
  return result;
}

ExperimentResult gates_experiment(const ExperimentConfig& config) {
  const Common c = common(config);
  const BuiltGraph built = graph_of(config, c);
  const ModelParams params{c.J, c.h, 1.0};
  const EnergyLandscape land(built.graph, params, c.landscape, kGateCap);
  const GateReport gates = gate_sets(land);

  ExperimentResult result;
  std::ostringstream text;
  write_gate_report(text, gates);
  result.text_files.emplace_back("gates.txt", text.str());

  Table table{"gates", {"set", "config_hex", "plus_count", "energy"}, {}, "plus_count", "energy", "set"};
  for (auto cfg : gates.p_star) table.add({"P*", config_hex(cfg), std::popcount(cfg), num(land.energy(cfg))});
  for (auto cfg : gates.c_star) table.add({"C*", config_hex(cfg), std::popcount(cfg), num(land.energy(cfg))});
  for (auto cfg : gates.below_level_extensions) {
    table.add({"below_level", config_hex(cfg), std::popcount(cfg), num(land.energy(cfg))});
  }
  result.tables.push_back(std::move(table));
  result.summary = {{"level", gates.level},
                    {"gamma_star", gates.level - land.energy(land.minus())},
                    {"p_star_size", gates.p_star.size()},
                    {"c_star_size", gates.c_star.size()},
                    {"below_level_extensions", gates.below_level_extensions.size()},
                    {"structural_error", gates.structural_error},
                    {"note", gates.note}};
  if (gates.structural_error) result.warnings.push_back("gate construction flagged for review: " + gates.note);
  return result;
}

ExperimentResult bounds_experiment(const ExperimentConfig& config) {
  const Common c = common(config);
  ExperimentResult result;
  Table table{"bounds", {"quantity", "value", "slack", "note"}, {}, "", "", ""};

  std::optional<DegreeSequence> degrees;
  if (config.has("degrees")) {
    degrees = read_degree_file(config.get("degrees", ""));
  } else if (config.has("graph")) {
    const BuiltGraph built = graph_of(config, c);
    degrees = built.degrees ? *built.degrees : sorted_degrees(built.graph);
  }

  if (degrees) {
    const DegreeSequence& d = *degrees;
    table.add({"n", d.size(), nullptr, ""});
    table.add({"ell_n", d.total(), nullptr, ""});
    table.add({"d_min", d.d_min(), nullptr, ""});
    table.add({"d_ave", num(d.d_ave()), nullptr, ""});
    try {
      const UpperBound up = gamma_upper(d, c.J, c.h, config.get_double("slack_c", 1.0));
      table.add({"m_bar", up.m_bar, nullptr, ""});
      table.add({"ell_mbar", up.ell_mbar, nullptr, ""});
      table.add({"gamma_plus", num(up.gamma_plus), num(up.slack),
                 "slack c*ell_n^(3/4), c=" + format_cell(json(up.slack_constant))});
      table.add({"m_bar_equivalent", up.m_bar_equivalent, nullptr, up.warning});
      if (std::isfinite(up.regular_closed_form)) table.add({"regular_closed_form", num(up.regular_closed_form), nullptr, "regular degrees"});
      result.summary["gamma_plus"] = up.gamma_plus;
      result.summary["m_bar"] = up.m_bar;
      if (!up.warning.empty()) result.warnings.push_back(up.warning);
      const WeakCondition weak = h_condition_weak(d, c.J, c.h);
      table.add({"h_condition_weak", weak.holds, nullptr, "margin " + format_cell(json(weak.worst_margin))});
      result.summary["h_condition_weak"] = weak.holds;
    } catch (const NumericError& e) {
      table.add({"m_bar", nullptr, nullptr, e.what()});
      result.warnings.push_back(e.what());
    }
    const LowerBound low = gamma_lower(d, c.J, c.h);
    table.add({"m_tilde", low.m_tilde, nullptr, ""});
    table.add({"i_dave_half", num(low.i_half), nullptr, low.saturated ? "saturated" : ""});
    table.add({"gamma_minus", num(low.gamma_minus), nullptr, low.note});
    result.summary["gamma_minus"] = low.gamma_minus;
    if (d.d_min() >= 3) {
      const bool strict = h_condition_strict(d.d_min(), d.d_ave(), c.J, c.h);
      table.add({"h_condition_strict", strict, nullptr,
                 "rhs " + format_cell(json(h_condition_strict_rhs(d.d_min(), d.d_ave())))});
      result.summary["h_condition_strict"] = strict;
    }
  }

  if (config.has("distribution")) {
    const DegreeDistribution dist = DegreeDistribution::parse(config.get("distribution", ""));
    if (dist.kind == DegreeDistribution::Kind::power_law) {
      const PowerLawQuantities q = power_law_quantities(dist.tau, dist.shift, c.J, c.h);
      table.add({"d_ave_limit", num(q.d_ave), nullptr, "power law"});
      table.add({"kappa", q.kappa, nullptr, q.kappa < 0 ? "printed threshold set is empty" : "threshold index as printed"});
      table.add({"kappa_group", q.kappa_group, nullptr, "degree group of the path peak"});
      table.add({"m_bar_frac", num(q.m_bar_frac), nullptr, ""});
      table.add({"ell_mbar_frac", num(q.ell_frac), nullptr, ""});
      table.add({"m_tilde_frac", num(q.m_tilde_frac), nullptr, "partial group"});
      table.add({"m_tilde_frac_group", num(q.m_tilde_frac_group), nullptr, "whole groups"});
      if (config.get_bool("literal", false)) {
        table.add({"m_bar_frac_literal", num(q.m_bar_frac_literal), nullptr, "as printed"});
        table.add({"ell_mbar_frac_literal", num(q.ell_frac_literal), nullptr, "as printed"});
        table.add({"m_tilde_frac_literal", num(q.m_tilde_frac_literal), nullptr, "as printed"});
      }
      result.summary["kappa"] = q.kappa;
      result.summary["m_bar_frac"] = q.m_bar_frac;
      result.summary["m_tilde_frac"] = q.m_tilde_frac;
    } else {
      const double r = dist.r;
      table.add({"regular_closed_form_per_n", num(c.J * r / 4.0 * (1.0 - std::pow(c.h / (c.J * r), 2))), nullptr, ""});
      table.add({"path_upper_per_n", num(c.J * r / 4.0 * std::pow(1.0 - c.h / (c.J * r), 2)), nullptr, ""});
      table.add({"lower_per_n", num(c.J * r * i_delta(r, 0.5) - c.h / 2.0), nullptr, "o(n) not subtracted"});
    }
  }
  if (!degrees && !config.has("distribution")) {
    throw ConfigError("bounds: give 'graph', 'degrees' or 'distribution'");
  }
  result.tables.push_back(std::move(table));
  return result;
}

ExperimentResult simulate_experiment(const ExperimentConfig& config) {
  const Common c = common(config);
  const BuiltGraph built = graph_of(config, c);
  const MultiGraph& g = built.graph;
  const auto betas = config.get_doubles("beta", {});
  if (betas.empty()) throw ConfigError("simulate: missing field 'beta'");
  const std::size_t replicas = positive(config, "replicas", 100);
  const double ks_scale = config.get_double("ks_scale", 1.0);

  ConfigPredicate gate;
  double gamma_star = kNaN;
  ExperimentResult result;
  if (g.n() <= kGateCap) {
    const EnergyLandscape land(g, {c.J, c.h, 1.0}, c.landscape, kGateCap);
    const GateReport gates = gate_sets(land);
    gate = index_set(g.n(), gates.c_star);
    gamma_star = gates.level - land.energy(land.minus());
  } else {
    result.warnings.push_back("graph above the gate cap: gate passage not tracked");
  }

  const SpinConfig minus = SpinConfig::all_minus(g.n());
  const auto target = [n = g.n()](const SpinConfig& s) { return s.count() == n; };

  Table samples{"hitting", {"beta", "replica", "tau", "events", "visited_gate", "truncated"}, {}, "", "", ""};
  Table arrhenius{"arrhenius", {"beta", "logmean", "mean", "stderr", "k_hat"}, {}, "beta", "logmean", ""};
  std::vector<double> means, stderrs, fit_betas;
  json per_beta = json::array();
  for (std::size_t i = 0; i < betas.size(); ++i) {
    const ModelParams params{c.J, c.h, betas[i]};
    const HittingEstimate est =
        estimate_mean_hitting(g, params, minus, target, gate, replicas, derive_seed(c.seed, i), c.workers, c.caps);
    std::vector<double> taus;
    std::size_t through = 0;
    for (std::size_t k = 0; k < est.samples.size(); ++k) {
      const auto& s = est.samples[k];
      samples.add({betas[i], k, num(s.tau), s.events, s.visited_gate, s.truncated});
      if (!s.truncated) {
        taus.push_back(s.tau);
        through += s.visited_gate;
      }
    }
    json entry = {{"beta", betas[i]},
                  {"mean", est.mean},
                  {"stderr", est.stderr_mean},
                  {"completed", est.completed},
                  {"truncated", est.truncated},
                  {"gate_fraction", static_cast<double>(through) / static_cast<double>(est.completed)}};
    if (taus.size() >= 100) {
      const KsResult ks = exponential_law_test(taus, ks_scale);
      entry["ks"] = ks.statistic;
      entry["ks_threshold"] = ks.threshold;
      entry["ks_pass"] = ks.pass;
    } else {
      entry["ks"] = nullptr;
    }
    const double k_hat = std::isfinite(gamma_star) ? est.mean * std::exp(-betas[i] * gamma_star) : kNaN;
    entry["k_hat"] = std::isfinite(k_hat) ? json(k_hat) : json(nullptr);
    per_beta.push_back(entry);
    arrhenius.add({betas[i], std::log(est.mean), num(est.mean), num(est.stderr_mean), num(k_hat)});
    fit_betas.push_back(betas[i]);
    means.push_back(est.mean);
    stderrs.push_back(est.stderr_mean);
    if (est.truncated > 0) {
      result.warnings.push_back("beta " + format_cell(json(betas[i])) + ": " + std::to_string(est.truncated) +
                                " replicas truncated");
    }
  }
  result.tables.push_back(std::move(samples));
  result.tables.push_back(std::move(arrhenius));
  result.summary["per_beta"] = per_beta;
  result.summary["gamma_star"] = std::isfinite(gamma_star) ? json(gamma_star) : json(nullptr);
  if (fit_betas.size() >= 3) {
    const ArrheniusFit fit = arrhenius_fit(fit_betas, means, stderrs);
    result.summary["slope"] = fit.slope;
    result.summary["intercept"] = fit.intercept;
    result.summary["slope_stderr"] = fit.slope_stderr;
  } else {
    result.summary["slope"] = nullptr;
    result.summary["intercept"] = nullptr;
  }
  result.summary["mean"] = per_beta.back()["mean"];
  result.summary["stderr"] = per_beta.back()["stderr"];
  result.summary["ks"] = per_beta.back()["ks"];
  return result;
}

// ---------------------------------------------------------------------------
// Coupling
// ---------------------------------------------------------------------------

namespace {

// Two new vertices with an even degree total.
std::vector<int> draw_pair(const DegreeDistribution& dist, Rng& rng) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const DegreeSequence d = [&] {
      if (dist.kind == DegreeDistribution::Kind::dirac) return DegreeSequence(std::vector<int>(2, dist.r));
      return sample_degrees(dist, 2, rng);
    }();
    return {d[0], d[1]};
  }
  throw NumericError("coupling: no even pair of degrees");
}

double landscape_gamma(const MultiGraph& g, double J, double h) {
  const EnergyLandscape land(g, {J, h, 1.0});
  return energy_barrier(land);
}

}  // namespace

CouplingDecay coupling_decay(std::size_t n, const DegreeDistribution& dist, const std::vector<std::size_t>& t_grid,
                             std::size_t seeds, std::uint64_t master, double J, double h, std::size_t exact_base,
                             std::size_t exact_seeds, std::size_t workers) {
  if (t_grid.empty()) throw ConfigError("coupling: empty t grid");
  std::vector<std::size_t> grid = t_grid;
  std::sort(grid.begin(), grid.end());
  const std::size_t t_max = grid.back();

  // mismatch[s][j]: |E delta E'| of seed s at grid point j; edges likewise.
  std::vector<std::vector<std::size_t>> mismatch(seeds, std::vector<std::size_t>(grid.size(), 0));
  std::vector<std::vector<double>> edges(seeds, std::vector<double>(grid.size(), 0.0));
  const auto run_seed = [&](std::size_t s) {
    Rng rng = Rng::stream(master, s);
    const DegreeSequence base = sample_degrees(dist, n, rng);
    CoupledCM pair = CoupledCM::independent(base, rng);
    std::size_t j = 0;
    while (j < grid.size() && grid[j] == 0) {
      mismatch[s][j] = pair.mismatch();
      edges[s][j] = static_cast<double>(pair.total_degree_a()) / 2.0;
      ++j;
    }
    while (pair.added_vertices() < t_max) {
      const auto degs = draw_pair(dist, rng);
      pair.grow(degs, rng);
      while (j < grid.size() && pair.added_vertices() >= grid[j]) {
        mismatch[s][j] = pair.mismatch();
        edges[s][j] = static_cast<double>(pair.total_degree_a()) / 2.0;
        ++j;
      }
    }
  };
  workers = std::max<std::size_t>(1, std::min(workers, seeds));
  {
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers; ++w) {
      threads.emplace_back([&, w] {
        for (std::size_t s = w; s < seeds; s += workers) run_seed(s);
      });
    }
    for (auto& t : threads) t.join();
  }

  CouplingDecay out;
  std::vector<double> lx, ly, ey;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    CouplingRow row;
    row.t = grid[j];
    std::size_t differ = 0;
    double total = 0.0;
    double rate = 0.0;
    for (std::size_t s = 0; s < seeds; ++s) {
      differ += mismatch[s][j] > 0;
      total += static_cast<double>(mismatch[s][j]);
      rate += static_cast<double>(mismatch[s][j]) / (2.0 * edges[s][j]);
    }
    row.mismatch_fraction = static_cast<double>(differ) / static_cast<double>(seeds);
    row.mean_mismatch = total / static_cast<double>(seeds);
    row.edge_rate = rate / static_cast<double>(seeds);
    out.rows.push_back(row);
    if (row.t >= 10 && row.t <= 1000 && row.t > 0) {
      if (row.mismatch_fraction > 0.0) {
        lx.push_back(std::log(static_cast<double>(row.t)));
        ly.push_back(std::log(row.mismatch_fraction));
      }
      if (row.edge_rate > 0.0) ey.push_back(std::log(row.edge_rate));
    }
  }
  if (lx.size() >= 2) {
    out.slope = line_fit(lx, ly).slope;
    out.slope_defined = true;
  }
  if (ey.size() == lx.size() && ey.size() >= 2) out.edge_slope = line_fit(lx, ey).slope;

  // Barrier differences on small coupled pairs.
  if (exact_base > 0) {
    for (std::size_t s = 0; s < exact_seeds; ++s) {
      Rng rng = Rng::stream(derive_seed(master, 0x1e44a), s);
      const DegreeSequence base = sample_degrees(dist, exact_base, rng);
      CoupledCM pair = CoupledCM::independent(base, rng);
      for (;;) {
        const std::size_t size = pair.label_count();
        ExactPairRow row;
        row.seed = s;
        row.t = pair.added_vertices();
        row.n = size;
        row.mismatch = pair.mismatch();
        row.gamma_a = landscape_gamma(pair.graph_a(), J, h);
        row.gamma_b = landscape_gamma(pair.graph_b(), J, h);
        row.bound = J * static_cast<double>(row.mismatch);
        row.violated = std::abs(row.gamma_a - row.gamma_b) > row.bound + kEnergyTol;
        out.exact_pairs.push_back(row);
        const auto degs = draw_pair(dist, rng);
        if (size + degs.size() > 12) break;
        pair.grow(degs, rng);
      }
    }
  }
  return out;
}

ExperimentResult couple_experiment(const ExperimentConfig& config) {
  const Common c = common(config);
  const std::size_t n = positive(config, "n", 20);
  const DegreeDistribution dist = DegreeDistribution::parse(config.get("distribution", "dirac 3"));
  std::vector<std::size_t> grid;
  for (long long t : config.get_ints("t", {10, 20, 50, 100, 200, 500, 1000})) {
    if (t < 0) throw ConfigError("field 't' must be >= 0");
    grid.push_back(static_cast<std::size_t>(t));
  }
  const std::size_t seeds = positive(config, "seeds", 200);
  const auto exact_base = static_cast<std::size_t>(config.get_int("exact_base", 6));
  const auto exact_seeds = static_cast<std::size_t>(config.get_int("exact_seeds", 20));
  const CouplingDecay decay = coupling_decay(n, dist, grid, seeds, c.seed, c.J, c.h, exact_base, exact_seeds, c.workers);

  ExperimentResult result;
  Table table{"coupling", {"t", "mismatch_fraction", "mean_mismatch", "edge_rate"}, {}, "t", "mismatch_fraction", ""};
  for (const auto& row : decay.rows) table.add({row.t, row.mismatch_fraction, row.mean_mismatch, row.edge_rate});
  result.tables.push_back(std::move(table));
  Table pairs{"exact_pairs", {"seed", "t", "n", "mismatch", "gamma_a", "gamma_b", "bound", "violated"}, {}, "", "", ""};
  std::size_t violations = 0;
  for (const auto& row : decay.exact_pairs) {
    pairs.add({row.seed, row.t, row.n, row.mismatch, row.gamma_a, row.gamma_b, row.bound, row.violated});
    violations += row.violated;
  }
  result.tables.push_back(std::move(pairs));
  result.summary = {{"slope", decay.slope_defined ? json(decay.slope) : json(nullptr)},
                    {"edge_rate_slope", decay.edge_slope},
                    {"exact_pair_rows", decay.exact_pairs.size()},
                    {"exact_pair_violations", violations}};
  return result;
}

// ---------------------------------------------------------------------------
// Matching moments
// ---------------------------------------------------------------------------

double z_mean_exact(std::size_t x, std::size_t t) {
  if (t == 0) return static_cast<double>(x);
  const double xx = static_cast<double>(x);
  const double tt = static_cast<double>(t);
  return xx * (xx - 1.0) / (xx + 2.0 * tt - 1.0);
}

double z_second_exact(std::size_t x, std::size_t t) {
  const double xx = static_cast<double>(x);
  if (t == 0) return xx * xx;
  const double tt = static_cast<double>(t);
  return xx * (xx - 1.0) * (xx * (xx - 3.0) + 4.0 * tt) / ((xx + 2.0 * tt - 1.0) * (xx + 2.0 * tt - 3.0));
}

double w_variance_exact(std::size_t x, std::size_t t) {
  if (t == 0) return 0.0;
  const double scale = static_cast<double>(x + 2 * t);
  const double m = z_mean_exact(x, t);
  return (z_second_exact(x, t) - m * m) / (scale * scale);
}

MomentRow matching_moments(std::size_t x, std::size_t t, std::size_t replicas, std::uint64_t seed) {
  if (x % 2 != 0) throw ConfigError("moments: x must be even");
  if (replicas < 2) throw ConfigError("moments: need at least 2 replicas");
  MomentRow row;
  row.x = x;
  row.t = t;
  row.replicas = replicas;
  std::vector<double> z(replicas), z2(replicas);
  for (std::size_t r = 0; r < replicas; ++r) {
    Rng rng = Rng::stream(seed, r);
    StubMatching m = uniform_matching(x, rng);
    for (std::size_t s = 0; s < t; ++s) dynamic_match_step(m, rng);
    const auto count = static_cast<double>(m.internal_count(x));
    z[r] = count;
    z2[r] = count * count;
  }
  const MeanStderr a = mean_stderr(z);
  const MeanStderr b = mean_stderr(z2);
  row.mean = a.mean;
  row.mean_se = a.stderr_mean;
  row.second = b.mean;
  row.second_se = b.stderr_mean;
  row.mean_exact = z_mean_exact(x, t);
  row.second_exact = z_second_exact(x, t);
  return row;
}

double max_cross_deviation(std::size_t M, std::uint64_t seed) {
  if (M % 2 != 0 || M < 4) throw ConfigError("concentration: M must be even and >= 4");
  Rng rng(seed);
  StubMatching m;
  while (m.points() < M) dynamic_match_step(m, rng);
  // Sweep prefixes: crossing pairs of {0..x-1} against the rest.
  long long cross = 0;
  double worst = 0.0;
  const double mm = static_cast<double>(M);
  for (std::size_t s = 0; s < M; ++s) {
    cross += static_cast<std::size_t>(m.partner(static_cast<Stub>(s))) > s ? 1 : -1;
    const std::size_t x = s + 1;
    if (x % 2 == 0) {
      const double xx = static_cast<double>(x);
      worst = std::max(worst, std::abs(static_cast<double>(cross) - xx * (mm - xx) / (mm - 1.0)));
    }
  }
  return worst;
}

namespace {

double double_factorial(std::size_t odd) {
  double v = 1.0;
  for (std::size_t k = odd; k > 1; k -= 2) v *= static_cast<double>(k);
  return v;
}

}  // namespace

UniformityCheck matching_uniformity(std::size_t points, std::size_t runs, std::uint64_t seed, bool dynamic) {
  if (points % 2 != 0 || points < 2 || points > 12) throw ConfigError("uniformity: points must be even in [2, 12]");
  std::map<std::vector<std::pair<Stub, Stub>>, std::size_t> counts;
  for (std::size_t r = 0; r < runs; ++r) {
    Rng rng = Rng::stream(seed, r);
    StubMatching m;
    if (dynamic) {
      while (m.points() < points) dynamic_match_step(m, rng);
    } else {
      m = uniform_matching(points, rng);
    }
    ++counts[m.pairs()];
  }
  UniformityCheck out;
  out.runs = runs;
  out.cells = static_cast<std::size_t>(double_factorial(points - 1));
  const double expected = static_cast<double>(runs) / static_cast<double>(out.cells);
  double chi = 0.0;
  for (const auto& [key, count] : counts) chi += std::pow(static_cast<double>(count) - expected, 2) / expected;
  chi += expected * static_cast<double>(out.cells - counts.size());  // unseen cells
  out.chi_square = chi;
  out.p_value = out.cells > 1 ? chi_square_pvalue(chi, static_cast<double>(out.cells - 1)) : 1.0;
  return out;
}

ExperimentResult moments_experiment(const ExperimentConfig& config) {
  const Common c = common(config);
  const std::size_t replicas = positive(config, "replicas", 30000);
  const std::size_t runs = positive(config, "runs", 30000);
  ExperimentResult result;

  Table moments{"moments",
                {"x", "t", "replicas", "mean", "mean_se", "mean_exact", "second", "second_se", "second_exact",
                 "w_var_exact"},
                {}, "t", "mean", "x"};
  std::size_t index = 0;
  std::size_t outside = 0;
  for (long long x : config.get_ints("x", {2, 4, 6})) {
    for (long long t : config.get_ints("t", {0, 1, 2, 5})) {
      if (x < 2 || t < 0) throw ConfigError("moments: need x >= 2 and t >= 0");
      const MomentRow row = matching_moments(static_cast<std::size_t>(x), static_cast<std::size_t>(t), replicas,
                                             derive_seed(c.seed, index++));
      const auto off = [](double v, double exact, double se) { return std::abs(v - exact) > 3.0 * se + 1e-12; };
      outside += off(row.mean, row.mean_exact, row.mean_se) || off(row.second, row.second_exact, row.second_se);
      moments.add({row.x, row.t, row.replicas, row.mean, row.mean_se, row.mean_exact, row.second, row.second_se,
                   row.second_exact, w_variance_exact(row.x, row.t)});
    }
  }
  result.tables.push_back(std::move(moments));

  Table uniform{"uniformity", {"points", "construction", "runs", "cells", "chi_square", "p_value"}, {}, "", "", ""};
  for (std::size_t points : {4, 6, 8}) {
    for (bool dynamic : {true, false}) {
      const UniformityCheck u = matching_uniformity(points, runs, derive_seed(c.seed, 1000 + points * 2 + dynamic), dynamic);
      uniform.add({points, dynamic ? "dynamic" : "static", u.runs, u.cells, u.chi_square, u.p_value});
    }
  }
  result.tables.push_back(std::move(uniform));

  Table conc{"concentration", {"M", "seed", "max_deviation"}, {}, "M", "max_deviation", ""};
  const std::size_t seeds = positive(config, "seeds", 5);
  std::vector<double> lx, ly;
  for (long long M : config.get_ints("M", {1000, 10000, 100000})) {
    double mean = 0.0;
    for (std::size_t s = 0; s < seeds; ++s) {
      const double d = max_cross_deviation(static_cast<std::size_t>(M), derive_seed(derive_seed(c.seed, 2000 + M), s));
      conc.add({M, s, d});
      mean += d / static_cast<double>(seeds);
    }
    lx.push_back(std::log(static_cast<double>(M)));
    ly.push_back(std::log(std::max(mean, 1e-300)));
  }
  result.tables.push_back(std::move(conc));
  result.summary["rows_outside_3se"] = outside;
  if (lx.size() >= 2) result.summary["concentration_exponent"] = line_fit(lx, ly).slope;
  return result;
}

// ---------------------------------------------------------------------------
// Erdos-Renyi
// ---------------------------------------------------------------------------

ErConcentration er_concentration(std::size_t n, double p, std::size_t sigma_size, std::size_t samples,
                                 std::uint64_t seed) {
  if (sigma_size > n) throw ConfigError("er: sigma size above n");
  ErConcentration out{n, p, sigma_size, samples, 0, 0, {}};
  const double mu = p * static_cast<double>(sigma_size) * static_cast<double>(n - sigma_size);
  if (!(mu > 0.0)) throw ConfigError("er: zero expected boundary");
  Rng graph_rng = Rng::stream(seed, 0);
  const MultiGraph g = build_er(n, p, graph_rng);
  for (std::size_t s = 0; s < samples; ++s) {
    Rng rng = Rng::stream(seed, 1 + s);
    const double ratio = static_cast<double>(boundary_edge_count(g, random_subset(n, sigma_size, rng))) / mu;
    out.ratios.push_back(ratio);
    out.within += ratio >= 0.9 && ratio <= 1.1;

    Rng fresh = Rng::stream(derive_seed(seed, 0xf7e54), s);
    const MultiGraph other = build_er(n, p, fresh);
    const double r2 = static_cast<double>(boundary_edge_count(other, random_subset(n, sigma_size, fresh))) / mu;
    out.within_fresh += r2 >= 0.9 && r2 <= 1.1;
  }
  return out;
}

ExperimentResult er_check_experiment(const ExperimentConfig& config) {
  const Common c = common(config);
  const std::size_t n = positive(config, "n", 200);
  const double p = config.get_double("p", std::log(static_cast<double>(n)) / static_cast<double>(n));
  const auto sigma_size = static_cast<std::size_t>(config.get_int("sigma_size", static_cast<long long>(n / 2)));
  const std::size_t samples = positive(config, "samples", 100);
  const ErConcentration conc = er_concentration(n, p, sigma_size, samples, c.seed);

  ExperimentResult result;
  Table ratios{"er_boundary", {"sample", "ratio"}, {}, "sample", "ratio", ""};
  for (std::size_t s = 0; s < conc.ratios.size(); ++s) ratios.add({s, conc.ratios[s]});
  result.tables.push_back(std::move(ratios));

  const std::size_t small_n = positive(config, "small_n", 12);
  const double small_p = config.get_double("small_p", 0.9);
  Rng rng = Rng::stream(c.seed, 0x5a11);
  const MultiGraph small = build_er(small_n, small_p, rng);
  const EnergyLandscape land(small, {c.J, c.h, 1.0}, c.landscape);
  const LandscapeReport report = classify_states(land);
  const double leading = er_leading_order(small_n, c.J, small_p * static_cast<double>(small_n));

  Table exact{"er_exact", {"graph", "n", "p", "gamma_star", "reference", "ratio", "h_holds"}, {}, "", "", ""};
  exact.add({"er", small_n, small_p, report.gamma_star, leading, report.gamma_star / leading, report.h_holds});
  const MultiGraph full = build_er(small_n, 1.0, rng);
  const double full_gamma = energy_barrier(EnergyLandscape(full, {c.J, c.h, 1.0}, c.landscape));
  double complete = kNaN;
  try {
    complete = complete_reference(small_n, c.J, c.h).gamma;
  } catch (const ConfigError& e) {
    result.warnings.push_back(e.what());
  }
  exact.add({"er_p1", small_n, 1.0, full_gamma, num(complete), num(full_gamma / complete), nullptr});
  result.tables.push_back(std::move(exact));

  result.summary = {{"n", n},
                    {"p", p},
                    {"sigma_size", sigma_size},
                    {"samples", samples},
                    {"within_band", conc.within},
                    {"within_band_fresh_graphs", conc.within_fresh},
                    {"small_ratio", report.gamma_star / leading},
                    {"small_h_holds", report.h_holds},
                    {"p1_matches_complete", std::isfinite(complete) && std::abs(full_gamma - complete) < 1e-9}};
  return result;
}

// ---------------------------------------------------------------------------
// Barrier scaling
// ---------------------------------------------------------------------------

ExperimentResult scaling_experiment(const ExperimentConfig& config) {
  const Common c = common(config);
  const DegreeDistribution dist = DegreeDistribution::parse(config.get("distribution", "dirac 3"));
  const std::size_t seeds = positive(config, "seeds", 20);
  const double slack_c = config.get_double("slack_c", 1.0);

  ExperimentResult result;
  Table rows{"scaling",
             {"graph", "n", "seed", "exact", "gamma_star", "path_height", "gamma_minus", "slack", "gamma_plus",
              "h_holds"},
             {}, "", "", ""};
  Table trend{"scaling_trend", {"graph", "n", "mean_gamma_per_n", "sd_gamma_per_n", "mean_height_per_n", "sd_height_per_n"},
              {}, "n", "mean_gamma_per_n", "graph"};

  for (long long nn : config.get_ints("n", {8, 12, 16})) {
    if (nn < 2) throw ConfigError("scaling: n must be >= 2");
    const auto n = static_cast<std::size_t>(nn);
    const bool exact = n <= kBarrierCap && (n <= 20 || c.landscape.override_cap);
    std::vector<double> gammas, heights;
    for (std::size_t s = 0; s < seeds; ++s) {
      const std::uint64_t inst = derive_seed(derive_seed(c.seed, n), s);
      Rng degree_rng = Rng::stream(inst, 0);
      const DegreeSequence degrees = sample_degrees(dist, n, degree_rng);
      Rng match_rng = Rng::stream(inst, 1);
      const MultiGraph g = build_cm_static(degrees, match_rng);
      const ModelParams params{c.J, c.h, 1.0};
      const SortedPath path = sorted_flip_path(g, params);
      const LowerBound low = gamma_lower(degrees, c.J, c.h);
      const double slack = slack_c * std::pow(static_cast<double>(degrees.total()), 0.75);
      double upper = kNaN;
      try {
        upper = gamma_upper(degrees, c.J, c.h, slack_c).gamma_plus;
      } catch (const NumericError&) {
      }
      double gamma = kNaN;
      json holds = nullptr;
      if (exact) {
        const EnergyLandscape land(g, params, c.landscape);
        const LandscapeReport report = classify_states(land);
        gamma = report.gamma_star;
        holds = report.h_holds;
        gammas.push_back(gamma / static_cast<double>(n));
      }
      heights.push_back(path.height / static_cast<double>(n));
      rows.add({"cm", n, s, exact, num(gamma), path.height, low.gamma_minus, slack, num(upper), holds});
    }
    const auto stats = [](const std::vector<double>& v) -> std::pair<double, double> {
      if (v.empty()) return {kNaN, kNaN};
      if (v.size() == 1) return {v.front(), 0.0};
      const MeanStderr ms = mean_stderr(v);
      return {ms.mean, ms.stderr_mean * std::sqrt(static_cast<double>(v.size()))};
    };
    const auto [gm, gs] = stats(gammas);
    const auto [hm, hs] = stats(heights);
    trend.add({"cm", n, num(gm), num(gs), hm, hs});

    if (n <= 16) {
      // Complete graph reference row: Gamma* / n^2.
      const MultiGraph kn = build_reference_graph({ReferenceGraph::Family::complete, n});
      const double gamma = energy_barrier(EnergyLandscape(kn, {c.J, c.h, 1.0}, c.landscape));
      const double per = gamma / static_cast<double>(n * n);
      rows.add({"complete", n, 0, true, gamma, sorted_flip_path(kn, {c.J, c.h, 1.0}).height, nullptr, nullptr, nullptr,
                nullptr});
      trend.add({"complete_per_n2", n, per, 0.0, nullptr, nullptr});
    }
  }
  result.tables.push_back(std::move(rows));
  result.tables.push_back(std::move(trend));
  return result;
}

}  // namespace metastab
