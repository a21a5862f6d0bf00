#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace cloak {

enum class Region { Exterior, Cloak, Inhomogeneity };
enum class EdgeTag { OuterLeft, OuterRight, OuterTop, OuterBottom, Hole, Cut };

const char* to_string(Region r);
const char* to_string(EdgeTag t);
Region parse_region(const std::string& s);
EdgeTag parse_edge_tag(const std::string& s);
inline bool is_outer(EdgeTag t) { return t != EdgeTag::Hole && t != EdgeTag::Cut; }

struct BoundaryEdge {
  int a = 0;
  int b = 0;
  EdgeTag tag = EdgeTag::OuterBottom;
};

/// Conforming P1 triangulation with region and boundary-edge tags. Triangles are
/// counter-clockwise. `h` is the largest triangle diameter.
struct Mesh {
  std::vector<Eigen::Vector2d> nodes;
  std::vector<std::array<int, 3>> tris;
  std::vector<Region> region;
  std::vector<BoundaryEdge> bedges;
  double h = 0.0;

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_tris() const { return static_cast<int>(tris.size()); }
  double area(int t) const;
  Eigen::Vector2d centroid(int t) const;
};

/// Signed area of the triangle (a, b, c); positive when counter-clockwise.
double signed_area(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c);

/// Largest edge length over all triangles.
double max_diameter(const Mesh& mesh);

/// Axis-aligned bounding box of the node cloud: {xmin, xmax, ymin, ymax}.
std::array<double, 4> bounding_box(const Mesh& mesh);

/// Edges used by exactly one triangle, oriented as they appear in that triangle.
std::vector<std::array<int, 2>> topological_boundary(const Mesh& mesh);

/// Rebuilds `bedges` from the topology: edges on the bounding rectangle get the matching
/// OUTER_* tag, every other boundary edge gets `inner`.
void tag_boundary(Mesh& mesh, EdgeTag inner);

struct ValidationReport {
  bool ok = true;
  std::string message;
};

/// Checks the mesh invariants and reports the first violation.
ValidationReport validate(const Mesh& mesh);

void save_mesh(const Mesh& mesh, const std::string& path);
Mesh load_mesh(const std::string& path);

/// Point location over a triangulation using a uniform bucket grid.
class PointLocator {
 public:
  explicit PointLocator(const Mesh& mesh);
  /// Index of a triangle containing p (with tolerance `tol` in barycentric coordinates) and
  /// the barycentric coordinates of p in it; -1 if none.
  int locate(const Eigen::Vector2d& p, Eigen::Vector3d& bary, double tol = 1e-10) const;

 private:
  const Mesh& mesh_;
  double x0_ = 0, y0_ = 0, dx_ = 1, dy_ = 1;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<int>> cells_;
};

}  // namespace cloak
