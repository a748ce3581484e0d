#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pqlap {

/// Boundary part a boundary edge belongs to.
///   gamma1: homogeneous Dirichlet (u = 0)
///   gamma2: prescribed conormal flux r
///   gamma3: Dirichlet level b (DND) or nonlinear Robin law (DNN)
enum class BoundaryPart : std::uint8_t { gamma1 = 1, gamma2 = 2, gamma3 = 3 };

enum class ProblemKind : std::uint8_t { dnd, dnn };

inline const char* to_string(BoundaryPart part) {
  switch (part) {
    case BoundaryPart::gamma1: return "gamma1";
    case BoundaryPart::gamma2: return "gamma2";
    case BoundaryPart::gamma3: return "gamma3";
  }
  return "?";
}

inline const char* to_string(ProblemKind kind) { return kind == ProblemKind::dnd ? "dnd" : "dnn"; }

struct Point {
  double x = 0.0;
  double y = 0.0;
};

using Triangle = std::array<std::size_t, 3>;

/// A tagged boundary edge. Stored with the domain interior on its left.
struct BoundaryEdge {
  std::array<std::size_t, 2> nodes;
  BoundaryPart part;
};

/// Tag assignment for the four sides of a rectangle.
struct SideLayout {
  BoundaryPart left = BoundaryPart::gamma1;
  BoundaryPart right = BoundaryPart::gamma3;
  BoundaryPart bottom = BoundaryPart::gamma2;
  BoundaryPart top = BoundaryPart::gamma2;
};

struct Rectangle {
  double x0 = 0.0, x1 = 1.0;
  double y0 = 0.0, y1 = 1.0;
};

/// Conforming triangulation with tagged boundary.  Immutable after construction;
/// the constructor checks orientation, tag coverage and Gamma1 non-emptiness and
/// precomputes per-triangle P1 basis gradients.
class Mesh {
 public:
  Mesh(std::vector<Point> nodes, std::vector<Triangle> triangles, std::vector<BoundaryEdge> edges,
       std::size_t subdivisions = 0)
      : nodes_(std::move(nodes)), triangles_(std::move(triangles)), edges_(std::move(edges)),
        subdivisions_(subdivisions) {
    validate_and_prepare();
  }

  const std::vector<Point>& nodes() const { return nodes_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<BoundaryEdge>& boundary_edges() const { return edges_; }
  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_triangles() const { return triangles_.size(); }
  /// Subdivisions per side for structured meshes, 0 otherwise.
  std::size_t subdivisions() const { return subdivisions_; }

  double area(std::size_t t) const { return areas_[t]; }
  /// Gradient of the P1 hat function of local vertex k on triangle t.
  const std::array<double, 2>& basis_gradient(std::size_t t, int k) const { return gradients_[t][k]; }

  double edge_length(std::size_t e) const {
    const auto& a = nodes_[edges_[e].nodes[0]];
    const auto& b = nodes_[edges_[e].nodes[1]];
    return std::hypot(b.x - a.x, b.y - a.y);
  }

  double boundary_length(BoundaryPart part) const {
    double len = 0.0;
    for (std::size_t e = 0; e < edges_.size(); ++e)
      if (edges_[e].part == part) len += edge_length(e);
    return len;
  }

  double total_area() const { return std::accumulate(areas_.begin(), areas_.end(), 0.0); }

  std::size_t count_edges(BoundaryPart part) const {
    return static_cast<std::size_t>(
        std::count_if(edges_.begin(), edges_.end(), [part](const BoundaryEdge& e) { return e.part == part; }));
  }

  /// Sorted, unique node indices touching edges of the given part.
  std::vector<std::size_t> boundary_nodes(BoundaryPart part) const {
    std::vector<std::size_t> out;
    for (const auto& e : edges_)
      if (e.part == part) out.insert(out.end(), e.nodes.begin(), e.nodes.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  bool is_on(std::size_t node, BoundaryPart part) const {
    return node_parts_[node] & (1u << static_cast<unsigned>(part));
  }

  /// Number of triangles sharing each undirected edge.
  std::map<std::pair<std::size_t, std::size_t>, int> edge_multiplicity() const {
    std::map<std::pair<std::size_t, std::size_t>, int> count;
    for (const auto& t : triangles_)
      for (int k = 0; k < 3; ++k) ++count[undirected(t[k], t[(k + 1) % 3])];
    return count;
  }

  /// Smallest and largest interior angle (radians) over all triangles.
  std::pair<double, double> angle_range() const {
    double lo = M_PI, hi = 0.0;
    for (const auto& t : triangles_) {
      for (int k = 0; k < 3; ++k) {
        const auto& a = nodes_[t[k]];
        const auto& b = nodes_[t[(k + 1) % 3]];
        const auto& c = nodes_[t[(k + 2) % 3]];
        const double ux = b.x - a.x, uy = b.y - a.y, vx = c.x - a.x, vy = c.y - a.y;
        const double ang = std::atan2(std::abs(ux * vy - uy * vx), ux * vx + uy * vy);
        lo = std::min(lo, ang);
        hi = std::max(hi, ang);
      }
    }
    return {lo, hi};
  }

  static std::pair<std::size_t, std::size_t> undirected(std::size_t a, std::size_t b) {
    return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
  }

 private:
  void validate_and_prepare() {
    const std::size_t nn = nodes_.size();
    areas_.resize(triangles_.size());
    gradients_.resize(triangles_.size());
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
      const auto& tri = triangles_[t];
      for (auto i : tri)
        if (i >= nn) throw std::invalid_argument("mesh: triangle " + std::to_string(t) + " references missing node");
      const auto& a = nodes_[tri[0]];
      const auto& b = nodes_[tri[1]];
      const auto& c = nodes_[tri[2]];
      const double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
      if (!(det > 0.0))
        throw std::invalid_argument("mesh: triangle " + std::to_string(t) + " has non-positive signed area");
      areas_[t] = 0.5 * det;
      // grad(phi_k) = rot90(opposite edge) / (2 area)
      const Point* v[3] = {&a, &b, &c};
      for (int k = 0; k < 3; ++k) {
        const Point& p1 = *v[(k + 1) % 3];
        const Point& p2 = *v[(k + 2) % 3];
        gradients_[t][k] = {(p1.y - p2.y) / det, (p2.x - p1.x) / det};
      }
    }

    // Directed triangle edges identify the boundary and its orientation.
    std::map<std::pair<std::size_t, std::size_t>, int> count = edge_multiplicity();
    std::map<std::pair<std::size_t, std::size_t>, std::pair<std::size_t, std::size_t>> directed;
    for (const auto& tri : triangles_)
      for (int k = 0; k < 3; ++k) directed[undirected(tri[k], tri[(k + 1) % 3])] = {tri[k], tri[(k + 1) % 3]};

    std::size_t boundary_count = 0;
    for (const auto& [key, c] : count) {
      if (c > 2) throw std::invalid_argument("mesh: edge shared by more than two triangles");
      if (c == 1) ++boundary_count;
    }
    std::map<std::pair<std::size_t, std::size_t>, bool> seen;
    for (auto& e : edges_) {
      const auto key = undirected(e.nodes[0], e.nodes[1]);
      auto it = count.find(key);
      if (it == count.end() || it->second != 1)
        throw std::invalid_argument("mesh: tagged edge is not a boundary edge");
      if (seen[key]) throw std::invalid_argument("mesh: boundary edge tagged twice");
      seen[key] = true;
      const auto d = directed[key];
      e.nodes = {d.first, d.second};
      if (e.part != BoundaryPart::gamma1 && e.part != BoundaryPart::gamma2 && e.part != BoundaryPart::gamma3)
        throw std::invalid_argument("mesh: invalid boundary tag");
    }
    if (edges_.size() != boundary_count)
      throw std::invalid_argument("mesh: boundary edges must all carry exactly one tag");
    if (count_edges(BoundaryPart::gamma1) == 0)
      throw std::invalid_argument("mesh: Gamma1 must be nonempty (positive measure)");

    node_parts_.assign(nn, 0);
    for (const auto& e : edges_)
      for (auto i : e.nodes) node_parts_[i] |= static_cast<std::uint8_t>(1u << static_cast<unsigned>(e.part));
  }

  std::vector<Point> nodes_;
  std::vector<Triangle> triangles_;
  std::vector<BoundaryEdge> edges_;
  std::size_t subdivisions_ = 0;
  std::vector<double> areas_;
  std::vector<std::array<std::array<double, 2>, 3>> gradients_;
  std::vector<std::uint8_t> node_parts_;
};

/// Structured mesh of a rectangle: n x n cells, each split along the (x0,y0)-(x1,y1)
/// diagonal direction. Nodes are numbered row-major from the bottom-left corner.
inline Mesh build_rectangle_mesh(std::size_t n, const Rectangle& box, const SideLayout& layout = {}) {
  if (n == 0) throw std::invalid_argument("mesh: subdivision count must be >= 1");
  if (!(box.x1 > box.x0) || !(box.y1 > box.y0)) throw std::invalid_argument("mesh: degenerate rectangle");
  if (layout.left != BoundaryPart::gamma1 && layout.right != BoundaryPart::gamma1 &&
      layout.bottom != BoundaryPart::gamma1 && layout.top != BoundaryPart::gamma1)
    throw std::invalid_argument("mesh: layout leaves Gamma1 empty (positive measure required)");

  const std::size_t m = n + 1;
  auto id = [m](std::size_t i, std::size_t j) { return j * m + i; };
  std::vector<Point> nodes;
  nodes.reserve(m * m);
  for (std::size_t j = 0; j <= n; ++j)
    for (std::size_t i = 0; i <= n; ++i)
      nodes.push_back({box.x0 + (box.x1 - box.x0) * static_cast<double>(i) / static_cast<double>(n),
                       box.y0 + (box.y1 - box.y0) * static_cast<double>(j) / static_cast<double>(n)});
  // Pin the far sides exactly so that u = b*x style oracles are nodal-exact.
  for (std::size_t k = 0; k <= n; ++k) {
    nodes[id(n, k)].x = box.x1;
    nodes[id(k, n)].y = box.y1;
  }

  std::vector<Triangle> tris;
  tris.reserve(2 * n * n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      tris.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }

  std::vector<BoundaryEdge> edges;
  edges.reserve(4 * n);
  for (std::size_t i = 0; i < n; ++i) edges.push_back({{id(i, 0), id(i + 1, 0)}, layout.bottom});
  for (std::size_t j = 0; j < n; ++j) edges.push_back({{id(n, j), id(n, j + 1)}, layout.right});
  for (std::size_t i = n; i > 0; --i) edges.push_back({{id(i, n), id(i - 1, n)}, layout.top});
  for (std::size_t j = n; j > 0; --j) edges.push_back({{id(0, j), id(0, j - 1)}, layout.left});

  return Mesh(std::move(nodes), std::move(tris), std::move(edges), n);
}

inline Mesh build_unit_square_mesh(std::size_t n, const SideLayout& layout = {}) {
  return build_rectangle_mesh(n, Rectangle{}, layout);
}

/// Uniform red refinement: every triangle is split into four through its edge
/// midpoints; boundary edges split in two and keep their tag.
inline Mesh refine(const Mesh& mesh) {
  std::vector<Point> nodes = mesh.nodes();
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> midpoint;
  auto mid = [&](std::size_t a, std::size_t b) {
    const auto key = Mesh::undirected(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    const auto& pa = nodes[a];
    const auto& pb = nodes[b];
    nodes.push_back({0.5 * (pa.x + pb.x), 0.5 * (pa.y + pb.y)});
    midpoint.emplace(key, nodes.size() - 1);
    return nodes.size() - 1;
  };

  std::vector<Triangle> tris;
  tris.reserve(4 * mesh.num_triangles());
  for (const auto& t : mesh.triangles()) {
    const std::size_t ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
    tris.push_back({t[0], ab, ca});
    tris.push_back({ab, t[1], bc});
    tris.push_back({ca, bc, t[2]});
    tris.push_back({ab, bc, ca});
  }
  std::vector<BoundaryEdge> edges;
  edges.reserve(2 * mesh.boundary_edges().size());
  for (const auto& e : mesh.boundary_edges()) {
    const std::size_t m = mid(e.nodes[0], e.nodes[1]);
    edges.push_back({{e.nodes[0], m}, e.part});
    edges.push_back({{m, e.nodes[1]}, e.part});
  }
  return Mesh(std::move(nodes), std::move(tris), std::move(edges), 2 * mesh.subdivisions());
}

/// Outward unit normal of boundary edge `edge_index`.
inline std::array<double, 2> boundary_normal(const Mesh& mesh, std::size_t edge_index) {
  if (edge_index >= mesh.boundary_edges().size())
    throw std::out_of_range("boundary_normal: index " + std::to_string(edge_index) + " is not a boundary edge");
  const auto& e = mesh.boundary_edges()[edge_index];
  const auto& a = mesh.nodes()[e.nodes[0]];
  const auto& b = mesh.nodes()[e.nodes[1]];
  const double len = std::hypot(b.x - a.x, b.y - a.y);
  // interior lies to the left of a->b
  return {(b.y - a.y) / len, -(b.x - a.x) / len};
}

/// Essential boundary conditions: u = 0 on Gamma1 nodes and, for DND, u = b on Gamma3 nodes.
/// Gamma1 wins on nodes shared by both parts.
struct DirichletSpec {
  ProblemKind kind = ProblemKind::dnn;
  std::vector<std::uint8_t> constrained;
  std::vector<double> values;

  bool is_constrained(std::size_t i) const { return constrained[i] != 0; }
  std::size_t count() const {
    return static_cast<std::size_t>(std::count(constrained.begin(), constrained.end(), std::uint8_t{1}));
  }
};

inline DirichletSpec make_dirichlet_spec(const Mesh& mesh, ProblemKind kind, double b) {
  DirichletSpec spec;
  spec.kind = kind;
  spec.constrained.assign(mesh.num_nodes(), 0);
  spec.values.assign(mesh.num_nodes(), 0.0);
  if (kind == ProblemKind::dnd) {
    for (auto i : mesh.boundary_nodes(BoundaryPart::gamma3)) {
      spec.constrained[i] = 1;
      spec.values[i] = b;
    }
  }
  for (auto i : mesh.boundary_nodes(BoundaryPart::gamma1)) {
    spec.constrained[i] = 1;
    spec.values[i] = 0.0;
  }
  return spec;
}

}  // namespace pqlap
