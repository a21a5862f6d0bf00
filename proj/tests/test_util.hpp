#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <unistd.h>

#include <Eigen/Core>

#include "cloak/geometry.hpp"

namespace test {

/// Path inside a per-process scratch directory.
inline std::string temp_path(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("cloak-test-" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

/// Coarse plain rectangle whose central triangles are relabelled as cloak, with one stiff
/// inclusion triangle in the middle. Small enough for dense finite-difference checks.
inline cloak::Geometry small_cloak_geometry(double h = 1.2, bool with_inhom = true) {
  cloak::GeometrySpec s;
  s.kind = cloak::GeometryKind::Plain;
  s.h = h;
  cloak::Geometry g = cloak::build_geometry(s);
  auto& m = g.physical;
  int centre = -1;
  double best = 1e300;
  for (int t = 0; t < m.num_tris(); ++t) {
    const Eigen::Vector2d c = m.centroid(t);
    if (std::abs(c.x()) < 1.8 && std::abs(c.y()) < 1.3) m.region[t] = cloak::Region::Cloak;
    if (c.norm() < best) {
      best = c.norm();
      centre = t;
    }
  }
  if (with_inhom) m.region[centre] = cloak::Region::Inhomogeneity;
  return g;
}

inline Eigen::VectorXd random_vector(int n, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> d(-scale, scale);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = d(rng);
  return v;
}

}  // namespace test
