#pragma once

// Plain-text formats: meshes, nodal fields and CSV tables.

#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pqlap/mesh.hpp"

namespace pqlap {

/// Shortest exact-enough rendering: 17 significant digits.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// 64-bit FNV-1a, used to tag outputs with the configuration they came from.
inline std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Mesh format, one record per line:
//   pqlap-mesh 1
//   subdivisions <n>
//   nodes <N>          followed by N lines "<i> <x> <y>"
//   triangles <T>      followed by T lines "<i> <a> <b> <c>"
//   edges <E>          followed by E lines "<i> <a> <b> <tag 1|2|3>"
inline void write_mesh(std::ostream& os, const Mesh& mesh) {
  os << "pqlap-mesh 1\n";
  os << "subdivisions " << mesh.subdivisions() << '\n';
  os << "nodes " << mesh.num_nodes() << '\n';
  for (std::size_t i = 0; i < mesh.num_nodes(); ++i)
    os << i << ' ' << format_double(mesh.nodes()[i].x) << ' ' << format_double(mesh.nodes()[i].y) << '\n';
  os << "triangles " << mesh.num_triangles() << '\n';
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    os << t << ' ' << tri[0] << ' ' << tri[1] << ' ' << tri[2] << '\n';
  }
  os << "edges " << mesh.boundary_edges().size() << '\n';
  for (std::size_t e = 0; e < mesh.boundary_edges().size(); ++e) {
    const auto& edge = mesh.boundary_edges()[e];
    os << e << ' ' << edge.nodes[0] << ' ' << edge.nodes[1] << ' ' << static_cast<int>(edge.part) << '\n';
  }
}

inline Mesh read_mesh(std::istream& is) {
  std::size_t line_no = 0;
  auto fail = [&](const std::string& msg) {
    throw std::runtime_error("mesh file line " + std::to_string(line_no) + ": " + msg);
  };
  auto next = [&]() {
    std::string line;
    while (std::getline(is, line)) {
      ++line_no;
      if (!line.empty() && line[0] != '#') return std::istringstream(line);
    }
    fail("unexpected end of file");
    return std::istringstream();
  };
  auto header = [&](const std::string& key) {
    auto ls = next();
    std::string word;
    std::size_t count = 0;
    if (!(ls >> word >> count) || word != key) fail("expected '" + key + " <count>'");
    return count;
  };

  {
    auto ls = next();
    std::string magic;
    int version = 0;
    if (!(ls >> magic >> version) || magic != "pqlap-mesh" || version != 1) fail("expected 'pqlap-mesh 1'");
  }
  const std::size_t subdivisions = header("subdivisions");
  std::vector<Point> nodes(header("nodes"));
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    auto ls = next();
    std::size_t idx;
    if (!(ls >> idx >> nodes[i].x >> nodes[i].y) || idx != i) fail("bad node record");
  }
  std::vector<Triangle> tris(header("triangles"));
  for (std::size_t t = 0; t < tris.size(); ++t) {
    auto ls = next();
    std::size_t idx;
    if (!(ls >> idx >> tris[t][0] >> tris[t][1] >> tris[t][2]) || idx != t) fail("bad triangle record");
  }
  std::vector<BoundaryEdge> edges(header("edges"));
  for (std::size_t e = 0; e < edges.size(); ++e) {
    auto ls = next();
    std::size_t idx;
    int tag = 0;
    if (!(ls >> idx >> edges[e].nodes[0] >> edges[e].nodes[1] >> tag) || idx != e || tag < 1 || tag > 3)
      fail("bad edge record");
    edges[e].part = static_cast<BoundaryPart>(tag);
  }
  return Mesh(std::move(nodes), std::move(tris), std::move(edges), subdivisions);
}

/// Nodal field file: comment header, then "<i> <x> <y> <value>" per node.
inline void write_nodal(std::ostream& os, const Mesh& mesh, const Eigen::VectorXd& values,
                        const std::string& comment = {}) {
  os << "# pqlap nodal field\n";
  if (!comment.empty()) os << "# " << comment << '\n';
  os << "# index x y value\n";
  for (std::size_t i = 0; i < mesh.num_nodes(); ++i)
    os << i << ' ' << format_double(mesh.nodes()[i].x) << ' ' << format_double(mesh.nodes()[i].y) << ' '
       << format_double(values[static_cast<Eigen::Index>(i)]) << '\n';
}

/// Reads a nodal field written by write_nodal, or a file with one value per line.
inline Eigen::VectorXd read_nodal(std::istream& is, const Mesh& mesh) {
  std::vector<double> vals;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::vector<double> cols;
    double v;
    while (ls >> v) cols.push_back(v);
    if (cols.size() == 1) {
      vals.push_back(cols[0]);
    } else if (cols.size() == 4) {
      if (static_cast<std::size_t>(cols[0]) != vals.size())
        throw std::runtime_error("nodal file line " + std::to_string(line_no) + ": node index out of order");
      vals.push_back(cols[3]);
    } else {
      throw std::runtime_error("nodal file line " + std::to_string(line_no) + ": expected 1 or 4 columns");
    }
  }
  if (vals.size() != mesh.num_nodes())
    throw std::runtime_error("nodal file has " + std::to_string(vals.size()) + " values, mesh has " +
                             std::to_string(mesh.num_nodes()) + " nodes");
  return Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

/// CSV table with a header row and a trailing '#' metadata block.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void add_row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_.size()) throw std::invalid_argument("csv: row width does not match header");
    rows_.push_back(cells);
  }
  void add_meta(const std::string& key, const std::string& value) { meta_.emplace_back(key, value); }

  std::size_t size() const { return rows_.size(); }

  void write(std::ostream& os) const {
    write_row(os, columns_);
    for (const auto& r : rows_) write_row(os, r);
    for (const auto& [k, v] : meta_) os << "# " << k << ": " << v << '\n';
  }

 private:
  static void write_row(std::ostream& os, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
  }

  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::pair<std::string, std::string>> meta_;
};

}  // namespace pqlap
