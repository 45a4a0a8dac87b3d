#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "metastab/error.hpp"
#include "metastab/experiments.hpp"

namespace {

struct Flag {
  const char* key;
  const char* help;
};

// Keys exposed as --<key with dashes>.
const std::vector<Flag> kCommon = {
    {"seed", "master seed (u64)"},
    {"out", "output directory"},
    {"format", "csv | json | plotdata"},
    {"workers", "worker threads"},
    {"cap_events", "event cap per replica"},
};

const std::map<std::string, std::vector<Flag>> kPerCommand = {
    {"generate", {{"graph", "graph spec, e.g. 'cm dirac 3 20'"}, {"allow_low_degree", "permit d_min < 3"}}},
    {"landscape",
     {{"graph", "graph spec"}, {"J", "coupling"}, {"h", "field"}, {"override_cap", "allow n up to 24"},
      {"v_table", "write the stability table"}}},
    {"gates", {{"graph", "graph spec"}, {"J", "coupling"}, {"h", "field"}, {"override_cap", "unused above 20"}}},
    {"bounds",
     {{"graph", "graph spec"}, {"degrees", "degree-sequence file"}, {"distribution", "'dirac r' or 'powerlaw tau d'"},
      {"J", "coupling"}, {"h", "field"}, {"slack_c", "slack constant"}, {"literal", "also print literal formulas"}}},
    {"simulate",
     {{"graph", "graph spec"}, {"J", "coupling"}, {"h", "field"}, {"beta", "comma-separated beta grid"},
      {"replicas", "replicas per beta"}, {"cap_seconds", "wall cap per replica"}, {"ks_scale", "KS threshold scale"},
      {"allow_low_degree", "permit d_min < 3"}}},
    {"couple",
     {{"n", "base size"}, {"distribution", "degree law"}, {"t", "added-vertex grid"}, {"seeds", "seeds"},
      {"J", "coupling"}, {"h", "field"}, {"exact_base", "base size of exact pairs (0 = skip)"},
      {"exact_seeds", "exact pairs"}}},
    {"moments",
     {{"x", "prefix sizes"}, {"t", "step counts"}, {"replicas", "replicas per cell"}, {"runs", "uniformity runs"},
      {"M", "concentration sizes"}, {"seeds", "concentration seeds"}}},
    {"er-check",
     {{"n", "vertices"}, {"p", "edge probability"}, {"sigma_size", "|sigma|"}, {"samples", "samples"},
      {"J", "coupling"}, {"h", "field"}, {"small_n", "exact instance size"}, {"small_p", "exact instance p"}}},
    {"scaling",
     {{"distribution", "degree law"}, {"n", "sizes"}, {"seeds", "instances per size"}, {"J", "coupling"},
      {"h", "field"}, {"slack_c", "slack constant"}, {"override_cap", "allow exact n up to 24"}}},
};

std::string dashed(std::string key) {
  for (char& c : key) {
    if (c == '_') c = '-';
  }
  return key;
}

std::string kind_of(const std::string& command) { return command; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Metastability of Ising models on random graphs"};
  app.set_help_flag("--help", "print help");
  app.require_subcommand(1);

  struct Command {
    CLI::App* app;
    std::string config_file;
    std::map<std::string, std::string> values;
    std::vector<std::string> sets;
  };
  std::map<std::string, Command> commands;
  for (const auto& [name, flags] : kPerCommand) {
    Command& cmd = commands[name];
    cmd.app = app.add_subcommand(name, "run the " + name + " experiment");
    cmd.app->set_help_flag("--help", "print help");
    cmd.app->add_option("--config", cmd.config_file, "INI file with [common] and [" + kind_of(name) + "]")
        ->check(CLI::ExistingFile);
    cmd.app->add_option("--set", cmd.sets, "extra key=value settings");
    for (const auto* list : {&kCommon, &flags}) {
      for (const Flag& f : *list) cmd.app->add_option("--" + dashed(f.key), cmd.values[f.key], f.help);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    for (auto& [name, cmd] : commands) {
      if (!cmd.app->parsed()) continue;
      metastab::ExperimentConfig config(kind_of(name));
      if (!cmd.config_file.empty()) metastab::load_config_file(cmd.config_file, config);
      for (const auto& [key, value] : cmd.values) {
        if (cmd.app->count("--" + dashed(key)) > 0) config.set(key, value);
      }
      for (const std::string& kv : cmd.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw metastab::ConfigError("--set expects key=value, got '" + kv + "'");
        config.set(kv.substr(0, eq), kv.substr(eq + 1), "--set");
      }
      const metastab::RunManifest manifest = metastab::run_experiment(config);
      for (const auto& w : manifest.json.value("warnings", nlohmann::json::array())) {
        std::cerr << "warning: " << w.get<std::string>() << '\n';
      }
      std::cout << manifest.json.dump(2) << '\n';
    }
  } catch (const metastab::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
