#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

namespace cloak::geom {

/// Constraint segment between two point indices. `label` is carried through splits so callers
/// can recover which polyline a sub-segment came from.
struct Segment {
  int a = 0;
  int b = 0;
  int label = 0;
};

struct Triangulation {
  std::vector<Eigen::Vector2d> points;
  std::vector<std::array<int, 3>> triangles;  // counter-clockwise
  std::vector<Segment> segments;              // constraints after midpoint splitting
};

/// Conforming Delaunay triangulation (incremental Bowyer-Watson) of a point set whose convex
/// hull is an axis-aligned rectangle. The four rectangle corners must be among `points`.
/// Constraint segments missing from the triangulation are split at their midpoints until every
/// sub-segment is an edge. When `mirror_x` is set the splits are mirrored about x = mirror_axis
/// so that a mirror-symmetric input keeps a mirror-symmetric node cloud.
Triangulation conforming_delaunay(std::vector<Eigen::Vector2d> points, std::vector<Segment> segments,
                                  bool mirror_x = false, double mirror_axis = 0.0);

}  // namespace cloak::geom
