#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "cloak/mesh.hpp"

namespace cloak {

enum class GeometryKind { Plain, EllipticHole, EllipticCut, RectInhom, RandomDisks };

struct Disk {
  Eigen::Vector2d center;
  double radius = 0.0;
};

/// Benchmark geometry parameters (lengths in L_o). The rectangle is [cx ± half_width] x
/// [cy ± half_height]; the carpet case places the cut on the bottom edge midpoint.
struct GeometrySpec {
  GeometryKind kind = GeometryKind::Plain;
  double half_width = 3.0;
  double half_height = 2.0;
  Eigen::Vector2d center = Eigen::Vector2d::Zero();

  // Elliptic hole (x, y semi-axes) and its cloak rim.
  double hole_ax = 2.0 / 3.0, hole_ay = 1.0;
  double cloak_ax = 4.0 / 3.0, cloak_ay = 5.0 / 3.0;

  // Elliptic cut: vertical major semi-axes on the bottom edge, horizontal minor semi-axes.
  double cut_major = 1.5, cut_minor = 0.15;
  double carpet_major = 2.0, carpet_minor = 0.65;

  // Rotated rectangular inhomogeneity.
  double inhom_width = 4.0 / 3.0, inhom_height = 8.0 / 21.0;
  double cloak_thickness = 1.0 / 3.0;  // added to each side length: outer rim 5/3 x 5/7
  double angle_deg = 45.0;

  // Random disks.
  int disk_count = 8;
  double disk_rmin = 0.15, disk_rmax = 0.45;
  double disk_cloak_factor = 1.5;
  double disk_clearance = 0.1;
  std::uint64_t seed = 42;
  int max_attempts = 100000;

  double h = 0.2;
  bool symmetric = true;  // mirror-symmetric node cloud about the vertical center line when possible
};

/// Default spec for one of the four benchmark examples (1 hole, 2 cut, 3 rectangle, 4 disks).
GeometrySpec example_geometry(int example);

/// A physical mesh together with its filled counterpart: the same triangulation of the whole
/// rectangle where hole triangles are kept and every triangle is homogeneous material.
struct Geometry {
  GeometrySpec spec;
  Mesh physical;
  Mesh filled;
  std::vector<int> filled_node;  // physical node -> filled node
  std::vector<Disk> disks;       // placed inclusions (random-disk case)
};

Geometry build_plain(const GeometrySpec& spec);
Geometry build_elliptic_hole(const GeometrySpec& spec);
Geometry build_elliptic_cut(const GeometrySpec& spec);
Geometry build_rect_inhom(const GeometrySpec& spec);
Geometry build_random_disks(const GeometrySpec& spec);
Geometry build_geometry(const GeometrySpec& spec);

/// Rejection-sampled disk placement (deterministic in the seed).
std::vector<Disk> place_disks(const GeometrySpec& spec);

/// Treats `mesh` as its own virtual body: all triangles become homogeneous exterior material
/// and hole boundaries are not filled. Used for externally supplied meshes without a companion.
Geometry geometry_from_mesh(const Mesh& mesh, double h);

}  // namespace cloak
