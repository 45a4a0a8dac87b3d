#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "metastab/error.hpp"
#include "metastab/graph.hpp"

namespace metastab {

void write_edge_list(std::ostream& out, const MultiGraph& g) {
  out << g.n() << ' ' << g.edge_count() << '\n';
  for (const Edge& e : g.edges()) out << e.u << ' ' << e.v << '\n';
}

MultiGraph read_edge_list(std::istream& in) {
  long long n = 0;
  long long m = 0;
  if (!(in >> n >> m) || n < 0 || m < 0) throw ConfigError("edge list: bad header, expected 'n m'");
  MultiGraph g(static_cast<std::size_t>(n));
  for (long long i = 0; i < m; ++i) {
    long long u = 0;
    long long v = 0;
    if (!(in >> u >> v)) throw ConfigError("edge list: expected " + std::to_string(m) + " edges, got " + std::to_string(i));
    if (u < 0 || v < 0 || u >= n || v >= n) throw ConfigError("edge list: vertex out of range on edge " + std::to_string(i));
    g.add_edge(static_cast<Vertex>(u), static_cast<Vertex>(v));
  }
  return g;
}

MultiGraph read_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open edge list '" + path + "'");
  return read_edge_list(in);
}

void write_edge_list_file(const std::string& path, const MultiGraph& g) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write edge list '" + path + "'");
  write_edge_list(out, g);
}

void write_degree_file(std::ostream& out, const DegreeSequence& degrees) {
  for (int d : degrees.degrees()) out << d << '\n';
}

DegreeSequence read_degree_file(std::istream& in) {
  std::vector<int> degrees;
  long long d = 0;
  while (in >> d) {
    if (d < 1 || d > 1'000'000'000) throw ConfigError("degree file: degree out of range: " + std::to_string(d));
    degrees.push_back(static_cast<int>(d));
  }
  if (!in.eof()) throw ConfigError("degree file: non-integer entry");
  return DegreeSequence(std::move(degrees));
}

DegreeSequence read_degree_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open degree file '" + path + "'");
  return read_degree_file(in);
}

}  // namespace metastab
