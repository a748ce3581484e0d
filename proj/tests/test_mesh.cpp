#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "pqlap/io.hpp"
#include "pqlap/mesh.hpp"

using namespace pqlap;

TEST(Mesh, UnitSquareN1Counts) {
  const Mesh m = build_unit_square_mesh(1);
  EXPECT_EQ(m.num_nodes(), 4u);
  EXPECT_EQ(m.num_triangles(), 2u);
  EXPECT_EQ(m.boundary_edges().size(), 4u);
  EXPECT_EQ(m.count_edges(BoundaryPart::gamma1), 1u);
  EXPECT_EQ(m.count_edges(BoundaryPart::gamma2), 2u);
  EXPECT_EQ(m.count_edges(BoundaryPart::gamma3), 1u);
}

TEST(Mesh, UnitSquareN2Counts) {
  const Mesh m = build_unit_square_mesh(2);
  EXPECT_EQ(m.num_nodes(), 9u);
  EXPECT_EQ(m.num_triangles(), 8u);
  EXPECT_EQ(m.boundary_edges().size(), 8u);
}

TEST(Mesh, RejectsZeroSubdivisions) { EXPECT_THROW(build_unit_square_mesh(0), std::invalid_argument); }

TEST(Mesh, RejectsLayoutWithoutGamma1) {
  SideLayout layout{BoundaryPart::gamma2, BoundaryPart::gamma3, BoundaryPart::gamma2, BoundaryPart::gamma2};
  EXPECT_THROW(build_unit_square_mesh(1, layout), std::invalid_argument);
}

TEST(Mesh, StructuralInvariants) {
  for (std::size_t n : {1u, 3u, 8u, 16u}) {
    const Mesh m = build_unit_square_mesh(n);
    EXPECT_EQ(m.num_nodes(), (n + 1) * (n + 1));
    EXPECT_EQ(m.num_triangles(), 2 * n * n);
    EXPECT_NEAR(m.total_area(), 1.0, 1e-12);
    for (std::size_t t = 0; t < m.num_triangles(); ++t) EXPECT_GT(m.area(t), 0.0);

    std::size_t boundary = 0;
    for (const auto& [edge, count] : m.edge_multiplicity()) {
      EXPECT_TRUE(count == 1 || count == 2);
      if (count == 1) ++boundary;
    }
    EXPECT_EQ(boundary, m.boundary_edges().size());
    EXPECT_EQ(m.count_edges(BoundaryPart::gamma1) + m.count_edges(BoundaryPart::gamma2) +
                  m.count_edges(BoundaryPart::gamma3),
              m.boundary_edges().size());
    EXPECT_NEAR(m.boundary_length(BoundaryPart::gamma2), 2.0, 1e-12);
  }
}

TEST(Mesh, RectangleAffineScaling) {
  const Mesh m = build_rectangle_mesh(4, Rectangle{-1.0, 2.0, 0.5, 1.5});
  EXPECT_NEAR(m.total_area(), 3.0, 1e-12);
  EXPECT_NEAR(m.boundary_length(BoundaryPart::gamma3), 1.0, 1e-12);
  EXPECT_NEAR(m.boundary_length(BoundaryPart::gamma2), 6.0, 1e-12);
}

namespace {

using Key = std::set<std::pair<double, double>>;

std::set<Key> triangle_sets(const Mesh& m) {
  std::set<Key> out;
  for (const auto& t : m.triangles()) {
    Key k;
    for (auto i : t) k.insert({m.nodes()[i].x, m.nodes()[i].y});
    out.insert(k);
  }
  return out;
}

}  // namespace

TEST(Mesh, RefineMatchesStructuredUpToNodeOrder) {
  const Mesh fine = refine(build_unit_square_mesh(1));
  const Mesh direct = build_unit_square_mesh(2);
  EXPECT_EQ(fine.num_nodes(), direct.num_nodes());
  EXPECT_EQ(fine.num_triangles(), 8u);
  EXPECT_EQ(fine.subdivisions(), 2u);
  EXPECT_EQ(triangle_sets(fine), triangle_sets(direct));
  for (auto part : {BoundaryPart::gamma1, BoundaryPart::gamma2, BoundaryPart::gamma3})
    EXPECT_EQ(fine.count_edges(part), direct.count_edges(part));
}

TEST(Mesh, RefinePreservesGeometry) {
  const Mesh m = build_unit_square_mesh(3);
  const Mesh r = refine(m);
  EXPECT_EQ(r.num_nodes(), 7u * 7u);
  EXPECT_EQ(r.num_triangles(), 4 * m.num_triangles());
  EXPECT_NEAR(r.boundary_length(BoundaryPart::gamma3), 1.0, 1e-14);
  EXPECT_NEAR(r.total_area(), 1.0, 1e-12);
}

TEST(Mesh, BoundaryNormals) {
  const Mesh m = build_unit_square_mesh(4);
  for (std::size_t e = 0; e < m.boundary_edges().size(); ++e) {
    const auto nu = boundary_normal(m, e);
    EXPECT_NEAR(std::hypot(nu[0], nu[1]), 1.0, 1e-14);
    const auto& a = m.nodes()[m.boundary_edges()[e].nodes[0]];
    const auto& b = m.nodes()[m.boundary_edges()[e].nodes[1]];
    const double mx = 0.5 * (a.x + b.x), my = 0.5 * (a.y + b.y);
    if (mx == 1.0) {
      EXPECT_DOUBLE_EQ(nu[0], 1.0);
      EXPECT_DOUBLE_EQ(nu[1], 0.0);
    }
    if (my == 1.0) {
      EXPECT_DOUBLE_EQ(nu[0], 0.0);
      EXPECT_DOUBLE_EQ(nu[1], 1.0);
    }
    // outward: the midpoint pushed along nu leaves the square
    const double px = mx + 1e-3 * nu[0], py = my + 1e-3 * nu[1];
    EXPECT_FALSE(px > 0.0 && px < 1.0 && py > 0.0 && py < 1.0);
  }
  EXPECT_THROW(boundary_normal(m, m.boundary_edges().size()), std::out_of_range);
}

TEST(Mesh, DirichletSpecSets) {
  const Mesh m = build_unit_square_mesh(4);
  const auto g1 = m.boundary_nodes(BoundaryPart::gamma1);
  const auto g3 = m.boundary_nodes(BoundaryPart::gamma3);
  const auto dnd = make_dirichlet_spec(m, ProblemKind::dnd, 2.0);
  const auto dnn = make_dirichlet_spec(m, ProblemKind::dnn, 2.0);
  EXPECT_EQ(dnd.count(), g1.size() + g3.size());
  EXPECT_EQ(dnn.count(), g1.size());
  for (auto i : g3) {
    EXPECT_TRUE(dnd.is_constrained(i));
    EXPECT_EQ(dnd.values[i], 2.0);
    EXPECT_FALSE(dnn.is_constrained(i));
  }
  for (auto i : g1) EXPECT_EQ(dnd.values[i], 0.0);
}

TEST(Mesh, RejectsBadInput) {
  std::vector<Point> nodes{{0, 0}, {1, 0}, {0, 1}};
  // clockwise triangle
  EXPECT_THROW(Mesh(nodes, {{0, 2, 1}}, {}), std::invalid_argument);
  // untagged boundary
  EXPECT_THROW(Mesh(nodes, {{0, 1, 2}}, {{{0, 1}, BoundaryPart::gamma1}}), std::invalid_argument);
  // interior-only tags leave Gamma1 empty
  EXPECT_THROW(Mesh(nodes, {{0, 1, 2}},
                    {{{0, 1}, BoundaryPart::gamma2}, {{1, 2}, BoundaryPart::gamma3}, {{2, 0}, BoundaryPart::gamma2}}),
               std::invalid_argument);
}

TEST(MeshIo, TextRoundTrip) {
  const Mesh m = refine(build_rectangle_mesh(3, Rectangle{0.0, 2.0, 0.0, 1.0}));
  std::stringstream ss;
  write_mesh(ss, m);
  const Mesh back = read_mesh(ss);
  ASSERT_EQ(back.num_nodes(), m.num_nodes());
  ASSERT_EQ(back.num_triangles(), m.num_triangles());
  ASSERT_EQ(back.boundary_edges().size(), m.boundary_edges().size());
  EXPECT_EQ(back.subdivisions(), m.subdivisions());
  for (std::size_t i = 0; i < m.num_nodes(); ++i) {
    EXPECT_EQ(back.nodes()[i].x, m.nodes()[i].x);
    EXPECT_EQ(back.nodes()[i].y, m.nodes()[i].y);
  }
  for (std::size_t e = 0; e < m.boundary_edges().size(); ++e) {
    EXPECT_EQ(back.boundary_edges()[e].nodes, m.boundary_edges()[e].nodes);
    EXPECT_EQ(back.boundary_edges()[e].part, m.boundary_edges()[e].part);
  }
}

TEST(MeshIo, RejectsMalformed) {
  std::stringstream ss("nodes 2\n0 0 0\n");
  EXPECT_THROW(read_mesh(ss), std::runtime_error);
}
