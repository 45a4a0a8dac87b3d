#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "metastab/error.hpp"
#include "metastab/experiments.hpp"

namespace metastab {

namespace {

constexpr const char* kVersion = "0.1.0";

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void Table::add(std::vector<nlohmann::json> row) {
  if (row.size() != columns.size()) {
    throw Error("table '" + name + "': row has " + std::to_string(row.size()) + " cells, expected " +
                std::to_string(columns.size()));
  }
  rows.push_back(std::move(row));
}

Format parse_format(const std::string& text) {
  if (text == "csv") return Format::csv;
  if (text == "json") return Format::json;
  if (text == "plotdata") return Format::plotdata;
  throw ConfigError("unknown format '" + text + "' (csv, json, plotdata)");
}

std::string format_extension(Format format) {
  switch (format) {
    case Format::csv: return "csv";
    case Format::json: return "json";
    case Format::plotdata: return "dat";
  }
  return "txt";
}

std::string format_cell(const nlohmann::json& value) {
  if (value.is_null()) return "";
  if (value.is_boolean()) return value.get<bool>() ? "true" : "false";
  if (value.is_number_integer() || value.is_number_unsigned()) return value.dump();
  if (value.is_number_float()) {
    const double v = value.get<double>();
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
  }
  if (value.is_string()) return value.get<std::string>();
  return value.dump();
}

void emit_report(std::ostream& out, const Table& table, Format format) {
  switch (format) {
    case Format::csv: {
      for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
      out << '\n';
      for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_escape(format_cell(row[i]));
        out << '\n';
      }
      return;
    }
    case Format::json: {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& row : table.rows) {
        nlohmann::json obj = nlohmann::json::object();
        for (std::size_t i = 0; i < row.size(); ++i) obj[table.columns[i]] = row[i];
        arr.push_back(std::move(obj));
      }
      out << arr.dump(2) << '\n';
      return;
    }
    case Format::plotdata: {
      const auto column = [&](const std::string& name) -> std::ptrdiff_t {
        for (std::size_t i = 0; i < table.columns.size(); ++i)
          if (table.columns[i] == name) return static_cast<std::ptrdiff_t>(i);
        return -1;
      };
      std::ptrdiff_t xi = column(table.plot_x);
      std::ptrdiff_t yi = column(table.plot_y);
      const std::ptrdiff_t si = table.plot_series.empty() ? -1 : column(table.plot_series);
      if (xi < 0 || yi < 0) {
        xi = 0;
        yi = table.columns.size() > 1 ? 1 : 0;
      }
      out << "# " << (table.columns.empty() ? "x" : table.columns[static_cast<std::size_t>(xi)]) << ' '
          << (table.columns.empty() ? "y" : table.columns[static_cast<std::size_t>(yi)]) << '\n';
      std::vector<std::string> series;
      for (const auto& row : table.rows) {
        const std::string s = si < 0 ? "" : format_cell(row[static_cast<std::size_t>(si)]);
        if (std::find(series.begin(), series.end(), s) == series.end()) series.push_back(s);
      }
      for (std::size_t k = 0; k < series.size(); ++k) {
        if (si >= 0) out << (k ? "\n\n" : "") << "# " << table.plot_series << '=' << series[k] << '\n';
        for (const auto& row : table.rows) {
          if (si >= 0 && format_cell(row[static_cast<std::size_t>(si)]) != series[k]) continue;
          out << format_cell(row[static_cast<std::size_t>(xi)]) << ' ' << format_cell(row[static_cast<std::size_t>(yi)]) << '\n';
        }
      }
      return;
    }
  }
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

ExperimentResult execute(const ExperimentConfig& config) {
  config.validate();
  const std::string& kind = config.kind();
  if (kind == "generate") return generate_experiment(config);
  if (kind == "landscape") return landscape_experiment(config);
  if (kind == "gates") return gates_experiment(config);
  if (kind == "bounds") return bounds_experiment(config);
  if (kind == "simulate") return simulate_experiment(config);
  if (kind == "couple") return couple_experiment(config);
  if (kind == "moments") return moments_experiment(config);
  if (kind == "er-check") return er_check_experiment(config);
  if (kind == "scaling") return scaling_experiment(config);
  throw ConfigError("unknown experiment '" + kind + "'");
}

RunManifest run_experiment(const ExperimentConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  const Format format = parse_format(config.get("format", "csv"));
  const std::filesystem::path out_dir = config.get("out", "out");

  ExperimentResult result = execute(config);

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + out_dir.string() + "': " + ec.message());

  RunManifest manifest;
  nlohmann::json outputs = nlohmann::json::array();
  const auto write = [&](const std::string& name, const std::string& content) {
    const auto path = out_dir / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw Error("write failed for '" + path.string() + "'");
    std::ostringstream hex;
    hex << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(content);
    outputs.push_back({{"file", name}, {"bytes", content.size()}, {"fnv1a64", hex.str()}});
  };

  for (const Table& table : result.tables) {
    std::ostringstream body;
    emit_report(body, table, format);
    write(table.name + "." + format_extension(format), body.str());
  }
  for (const auto& [name, content] : result.text_files) write(name, content);
  write("summary.json", result.summary.dump(2) + "\n");

  const std::chrono::duration<double> spent = std::chrono::steady_clock::now() - started;
  manifest.json = {{"experiment", config.kind()},
                   {"version", kVersion},
                   {"config", config.values()},
                   {"outputs", outputs},
                   {"warnings", result.warnings},
                   {"wall_seconds", spent.count()}};
  std::ofstream(out_dir / "manifest.json") << manifest.json.dump(2) << '\n';
  return manifest;
}

}  // namespace metastab
