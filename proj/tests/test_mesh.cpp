#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>

#include "cloak/error.hpp"
#include "cloak/geometry.hpp"
#include "cloak/mesh.hpp"
#include "cloak/predicates.hpp"
#include "cloak/triangulate.hpp"
#include "test_util.hpp"

using namespace cloak;
using geom::conforming_delaunay;
using geom::Triangulation;

namespace {

double region_area(const Mesh& m, Region r) {
  double a = 0.0;
  for (int t = 0; t < m.num_tris(); ++t)
    if (m.region[t] == r) a += m.area(t);
  return a;
}

double total_area(const Mesh& m) {
  double a = 0.0;
  for (int t = 0; t < m.num_tris(); ++t) a += m.area(t);
  return a;
}

bool has_tag(const Mesh& m, EdgeTag tag) {
  for (const auto& e : m.bedges)
    if (e.tag == tag) return true;
  return false;
}

}  // namespace

TEST(Predicates, OrientAndIncircle) {
  const Eigen::Vector2d a(0, 0), b(1, 0), c(0, 1);
  EXPECT_EQ(geom::orient(a, b, c), 1);
  EXPECT_EQ(geom::orient(a, c, b), -1);
  EXPECT_EQ(geom::orient(a, b, Eigen::Vector2d(2, 0)), 0);
  EXPECT_EQ(geom::incircle(a, b, c, Eigen::Vector2d(0.5, 0.5)), 1);
  EXPECT_EQ(geom::incircle(a, b, c, Eigen::Vector2d(1, 1)), 0);
  EXPECT_EQ(geom::incircle(a, b, c, Eigen::Vector2d(2, 2)), -1);
}

TEST(Predicates, NearlyCollinearIsExact) {
  // Points differing in the last bits: the filter must defer to exact arithmetic.
  const Eigen::Vector2d a(0.5, 0.5), b(12.0, 12.0), c(24.0, 24.0 + std::ldexp(1.0, -48));
  EXPECT_EQ(geom::orient(a, b, c), 1);
  EXPECT_EQ(geom::orient(a, b, Eigen::Vector2d(24.0, 24.0)), 0);
}

TEST(Triangulate, SquareWithInteriorPoints) {
  std::vector<Eigen::Vector2d> pts = {{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}, {0.25, 0.7}};
  const Triangulation tri = conforming_delaunay(pts, {});
  double area = 0.0;
  for (const auto& t : tri.triangles) {
    const double a = signed_area(tri.points[t[0]], tri.points[t[1]], tri.points[t[2]]);
    EXPECT_GT(a, 0.0);
    area += a;
  }
  EXPECT_NEAR(area, 1.0, 1e-14);
  EXPECT_EQ(tri.triangles.size(), 2 * pts.size() - 4 - 2);  // 2n - h - 2 with h = 4 hull points
}

TEST(Triangulate, ConstraintIsRecovered) {
  std::vector<Eigen::Vector2d> pts = {{0, 0}, {4, 0}, {4, 1}, {0, 1}, {1, 0.1}, {3, 0.9}, {2, 0.56}, {2.2, 0.2}};
  const Triangulation tri = conforming_delaunay(pts, {{4, 5, 7}});
  // Every constraint piece must be a triangle edge.
  for (const auto& s : tri.segments) {
    bool found = false;
    for (const auto& t : tri.triangles)
      for (int k = 0; k < 3; ++k) {
        const int p = t[k], q = t[(k + 1) % 3];
        if ((p == s.a && q == s.b) || (p == s.b && q == s.a)) found = true;
      }
    EXPECT_TRUE(found);
    EXPECT_EQ(s.label, 7);
  }
}

TEST(EllipticHole, DefaultMeshIsValid) {
  GeometrySpec s = example_geometry(1);
  s.h = 0.2;
  const Geometry g = build_geometry(s);
  const auto rep = validate(g.physical);
  EXPECT_TRUE(rep.ok) << rep.message;
  EXPECT_TRUE(has_tag(g.physical, EdgeTag::Hole));
  EXPECT_FALSE(has_tag(g.physical, EdgeTag::Cut));
  EXPECT_LE(g.physical.h, 2.0 * s.h);
  // Ellipse areas: rectangle minus hole, annulus for the cloak.
  const double hole = M_PI * (2.0 / 3.0) * 1.0, rim = M_PI * (4.0 / 3.0) * (5.0 / 3.0);
  EXPECT_NEAR(total_area(g.physical), 24.0 - hole, 24.0 * s.h * s.h / 8);
  EXPECT_NEAR(region_area(g.physical, Region::Cloak), rim - hole, 0.02 * (rim - hole));
  EXPECT_TRUE(validate(g.filled).ok);
  EXPECT_NEAR(total_area(g.filled), 24.0, 1e-12);
}

TEST(EllipticHole, HoleOutsideRimRejected) {
  GeometrySpec s = example_geometry(1);
  s.hole_ax = 1.5;
  EXPECT_THROW(build_geometry(s), Error);
}

TEST(EllipticHole, RefinementQuadruplesTriangles) {
  GeometrySpec s = example_geometry(1);
  s.h = 0.2;
  const int n1 = build_geometry(s).physical.num_tris();
  s.h = 0.1;
  const int n2 = build_geometry(s).physical.num_tris();
  const double ratio = static_cast<double>(n2) / n1;
  EXPECT_GT(ratio, 3.0);
  EXPECT_LT(ratio, 5.0);
}

TEST(EllipticHole, RegionAreasConvergeUnderRefinement) {
  GeometrySpec s = example_geometry(1);
  const double exact = M_PI * ((4.0 / 3.0) * (5.0 / 3.0) - 2.0 / 3.0);
  s.h = 0.2;
  const double e1 = std::abs(region_area(build_geometry(s).physical, Region::Cloak) - exact);
  s.h = 0.1;
  const double e2 = std::abs(region_area(build_geometry(s).physical, Region::Cloak) - exact);
  EXPECT_LT(e2, 0.5 * e1);  // second order: about a quarter
}

TEST(EllipticCut, CloakTouchesBottomEdge) {
  GeometrySpec s = example_geometry(2);
  s.h = 0.15;
  const Geometry g = build_geometry(s);
  ASSERT_TRUE(validate(g.physical).ok);
  EXPECT_TRUE(has_tag(g.physical, EdgeTag::Cut));
  const double ymin = bounding_box(g.physical)[2];
  bool touches = false;
  for (int t = 0; t < g.physical.num_tris() && !touches; ++t) {
    if (g.physical.region[t] != Region::Cloak) continue;
    for (int v : g.physical.tris[t]) touches |= std::abs(g.physical.nodes[v].y() - ymin) < 1e-12;
  }
  EXPECT_TRUE(touches);
  const double half_annulus = 0.5 * M_PI * (s.carpet_major * s.carpet_minor - s.cut_major * s.cut_minor);
  EXPECT_NEAR(region_area(g.physical, Region::Cloak), half_annulus, 0.03 * half_annulus);
}

TEST(EllipticCut, CutLargerThanCloakRejected) {
  GeometrySpec s = example_geometry(2);
  s.cut_major = 2.5;
  EXPECT_THROW(build_geometry(s), Error);
}

TEST(EllipticCut, MirrorSymmetricNodes) {
  GeometrySpec s = example_geometry(2);
  s.h = 0.2;
  s.symmetric = true;
  const Mesh m = build_geometry(s).physical;
  const double cx = s.center.x();
  std::map<std::pair<double, double>, int> index;
  for (int i = 0; i < m.num_nodes(); ++i) index[{m.nodes[i].x(), m.nodes[i].y()}] = i;
  double worst = 0.0;
  for (const auto& p : m.nodes) {
    const double mx = 2 * cx - p.x();
    auto it = index.lower_bound({mx - 1e-9, -1e300});
    double best = 1e300;
    for (; it != index.end() && it->first.first <= mx + 1e-9; ++it)
      best = std::min(best, std::hypot(it->first.first - mx, it->first.second - p.y()));
    worst = std::max(worst, best);
  }
  EXPECT_LE(worst, 1e-12);
}

TEST(RectInhom, InhomogeneityArea) {
  GeometrySpec s = example_geometry(3);
  s.h = 0.2;
  const Geometry g = build_geometry(s);
  ASSERT_TRUE(validate(g.physical).ok);
  EXPECT_NEAR(region_area(g.physical, Region::Inhomogeneity), (4.0 / 3.0) * (8.0 / 21.0), 0.01 * 0.5079);
  // Rectangular annulus 5/3 x 5/7 minus the inclusion.
  const double outer = (5.0 / 3.0) * (5.0 / 7.0);
  EXPECT_NEAR(region_area(g.physical, Region::Cloak), outer - (4.0 / 3.0) * (8.0 / 21.0), 1e-9);
  EXPECT_NEAR(total_area(g.physical), 24.0, 1e-12);
}

TEST(RectInhom, AxisAlignedVariant) {
  GeometrySpec s = example_geometry(3);
  s.h = 0.2;
  s.angle_deg = 0.0;
  const Mesh m = build_geometry(s).physical;
  ASSERT_TRUE(validate(m).ok);
  for (int t = 0; t < m.num_tris(); ++t) {
    if (m.region[t] != Region::Inhomogeneity) continue;
    const auto c = m.centroid(t);
    EXPECT_LE(std::abs(c.x()), 2.0 / 3.0 + 1e-12);
    EXPECT_LE(std::abs(c.y()), 4.0 / 21.0 + 1e-12);
  }
}

TEST(RectInhom, ZeroThicknessRejected) {
  GeometrySpec s = example_geometry(3);
  s.cloak_thickness = 0.0;
  EXPECT_THROW(build_geometry(s), Error);
}

TEST(RandomDisks, SeededPlacementIsDisjointAndDeterministic) {
  GeometrySpec s = example_geometry(4);
  s.h = 0.2;
  const auto disks = place_disks(s);
  ASSERT_EQ(disks.size(), 8u);
  for (std::size_t i = 0; i < disks.size(); ++i) {
    const auto& d = disks[i];
    EXPECT_GE(d.radius, 0.15);
    EXPECT_LE(d.radius, 0.45);
    const double R = 1.5 * d.radius;
    EXPECT_LE(std::abs(d.center.x() - s.center.x()) + R, s.half_width);
    EXPECT_LE(std::abs(d.center.y() - s.center.y()) + R, s.half_height);
    for (std::size_t j = 0; j < i; ++j)
      EXPECT_GT((d.center - disks[j].center).norm(), R + 1.5 * disks[j].radius);
  }
  const Geometry a = build_geometry(s), b = build_geometry(s);
  EXPECT_EQ(a.physical.region, b.physical.region);
  EXPECT_EQ(a.physical.nodes, b.physical.nodes);
  EXPECT_TRUE(validate(a.physical).ok);
}

TEST(RandomDisks, ZeroDisksGivesPlainRectangle) {
  GeometrySpec s = example_geometry(4);
  s.disk_count = 0;
  s.h = 0.3;
  const Mesh m = build_geometry(s).physical;
  EXPECT_EQ(region_area(m, Region::Cloak), 0.0);
  EXPECT_NEAR(region_area(m, Region::Exterior), 24.0, 1e-12);
}

TEST(RandomDisks, InfeasiblePackingReportsSeed) {
  GeometrySpec s = example_geometry(4);
  s.disk_count = 100;
  s.disk_rmin = s.disk_rmax = 0.45;
  s.max_attempts = 2000;
  s.seed = 7;
  try {
    place_disks(s);
    FAIL() << "expected placement failure";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("7"), std::string::npos);
  }
}

TEST(MeshIo, RoundTrip) {
  GeometrySpec s = example_geometry(1);
  s.h = 0.3;
  const Mesh m = build_geometry(s).physical;
  const auto path = test::temp_path("roundtrip.cloakmesh");
  save_mesh(m, path);
  const Mesh r = load_mesh(path);
  EXPECT_EQ(r.nodes, m.nodes);
  EXPECT_EQ(r.tris, m.tris);
  EXPECT_EQ(r.region, m.region);
  ASSERT_EQ(r.bedges.size(), m.bedges.size());
  for (std::size_t i = 0; i < m.bedges.size(); ++i) {
    EXPECT_EQ(r.bedges[i].a, m.bedges[i].a);
    EXPECT_EQ(r.bedges[i].b, m.bedges[i].b);
    EXPECT_EQ(r.bedges[i].tag, m.bedges[i].tag);
  }
  EXPECT_EQ(r.h, m.h);
}

TEST(MeshIo, HandWrittenUnitSquare) {
  const auto path = test::temp_path("square.cloakmesh");
  std::ofstream(path) << "cloakmesh 1\nnodes 4\n0 0\n1 0\n1 1\n0 1\ntris 2\n0 1 2 EXTERIOR\n0 2 3 EXTERIOR\n"
                         "bedges 4\n0 1 OUTER_BOTTOM\n1 2 OUTER_RIGHT\n2 3 OUTER_TOP\n3 0 OUTER_LEFT\n";
  const Mesh m = load_mesh(path);
  EXPECT_EQ(m.num_tris(), 2);
  EXPECT_DOUBLE_EQ(m.h, std::sqrt(2.0));
}

TEST(MeshIo, NonConformingRejected) {
  // Node 4 sits on edge (1,2) of the first triangle: a hanging node.
  const auto path = test::temp_path("hanging.cloakmesh");
  std::ofstream(path) << "cloakmesh 1\nnodes 5\n0 0\n1 0\n1 1\n0 1\n1 0.5\ntris 3\n0 1 2 EXTERIOR\n0 2 3 EXTERIOR\n"
                         "1 4 2 EXTERIOR\nbedges 4\n0 1 OUTER_BOTTOM\n1 2 OUTER_RIGHT\n2 3 OUTER_TOP\n3 0 OUTER_LEFT\n";
  EXPECT_THROW(load_mesh(path), Error);
}

TEST(MeshIo, InvertedTriangleRejected) {
  const auto path = test::temp_path("inverted.cloakmesh");
  std::ofstream(path) << "cloakmesh 1\nnodes 4\n0 0\n1 0\n1 1\n0 1\ntris 2\n0 2 1 EXTERIOR\n0 2 3 EXTERIOR\n"
                         "bedges 4\n0 1 OUTER_BOTTOM\n1 2 OUTER_RIGHT\n2 3 OUTER_TOP\n3 0 OUTER_LEFT\n";
  EXPECT_THROW(load_mesh(path), Error);
}

TEST(MeshIo, MalformedFileRejected) {
  const auto path = test::temp_path("bad.cloakmesh");
  std::ofstream(path) << "cloakmesh 1\nnodes 2\n0 0\n";
  EXPECT_THROW(load_mesh(path), Error);
}

TEST(Mesh, EdgeUseCounts) {
  GeometrySpec s = example_geometry(1);
  s.h = 0.3;
  const Mesh m = build_geometry(s).physical;
  std::map<std::pair<int, int>, int> uses;
  for (const auto& t : m.tris)
    for (int k = 0; k < 3; ++k) {
      const int a = t[k], b = t[(k + 1) % 3];
      ++uses[{std::min(a, b), std::max(a, b)}];
    }
  std::size_t boundary = 0;
  for (const auto& [e, n] : uses) {
    EXPECT_TRUE(n == 1 || n == 2);
    boundary += n == 1;
  }
  EXPECT_EQ(boundary, m.bedges.size());
}

TEST(PointLocator, FindsContainingTriangle) {
  GeometrySpec s = example_geometry(1);
  s.h = 0.3;
  const Mesh m = build_geometry(s).filled;
  const PointLocator loc(m);
  for (int t = 0; t < m.num_tris(); t += 7) {
    const Eigen::Vector2d c = m.centroid(t);
    Eigen::Vector3d bary;
    const int found = loc.locate(c, bary);
    ASSERT_GE(found, 0);
    Eigen::Vector2d back = Eigen::Vector2d::Zero();
    for (int k = 0; k < 3; ++k) back += bary(k) * m.nodes[m.tris[found][k]];
    EXPECT_LT((back - c).norm(), 1e-12);
  }
  Eigen::Vector3d bary;
  EXPECT_EQ(loc.locate(Eigen::Vector2d(100, 100), bary), -1);
}
