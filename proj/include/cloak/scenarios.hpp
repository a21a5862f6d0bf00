#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "cloak/config.hpp"
#include "cloak/geometry.hpp"
#include "cloak/material.hpp"
#include "cloak/mesh.hpp"

namespace cloak {

enum class LoadId { XT, YT, ST, XD, YD, SD };

const char* to_string(LoadId id);
LoadId parse_load_id(const std::string& s);

/// Outer rectangle the loads refer to. Displacements are measured from its center.
struct LoadFrame {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double half_width = 3.0;
  double half_height = 2.0;
};

/// One service/optimization load. `magnitude` is the traction for XT/YT/ST and the nominal
/// strain for XD/YD/SD. Hole and cut boundaries are always traction free.
struct LoadCase {
  LoadId id = LoadId::XT;
  double weight = 1.0;
  double magnitude = 1e-2;
  LoadFrame frame;
  Eigen::Vector2d body_force = Eigen::Vector2d::Zero();

  bool pure_traction() const { return id == LoadId::XT || id == LoadId::YT || id == LoadId::ST; }
  /// True when the displacement is prescribed on outer edges with this tag.
  bool is_dirichlet(EdgeTag tag) const;
  /// Traction on a Neumann edge with the given tag.
  Eigen::Vector2d traction(const Eigen::Vector2d& x, EdgeTag tag) const;
  /// Prescribed displacement on a Dirichlet edge.
  Eigen::Vector2d displacement(const Eigen::Vector2d& x) const;
};

LoadCase make_load(LoadId id, double magnitude, const LoadFrame& frame = {});

struct SolverConfig {
  double k_target = 1e7;
  double k0 = 10.0;
  double growth = 10.0;
  int max_bisections = 8;
  double newton_tol = 1e-9;
  int max_newton_iters = 25;
  double pivot_tol = 1e-14;
  bool normalize_k = true;
  bool early_stop = false;
  double early_stop_gain = 0.01;
  double early_stop_design = 0.05;
  double m1 = 1.0, m2 = 1.0, alpha1 = 1.0, alpha2 = 1.0;
  int quad_degree = 2;
  bool verbose = false;
  std::uint64_t seed = 42;
};

struct Scenario {
  int example = 1;
  std::string load_name = "XT";
  GeometrySpec geometry;
  BaseMaterial base;
  double stiffness_ratio = 1e3;
  double traction = 1e-2;
  double strain = 1e-2;
  std::vector<LoadCase> loads;
  SolverConfig solver;
};

/// Loads available for an example (single loads plus MT/MD where defined).
std::vector<std::string> example_loads(int example);

/// Benchmark scenario; `load` is one of XT..SD, MT, MD. Values in `overrides` replace defaults.
Scenario make_scenario(int example, const std::string& load, const Config& overrides = {});

/// Load list for a named load on a given frame with the scenario's magnitudes and weights.
std::vector<LoadCase> scenario_loads(int example, const std::string& load, const LoadFrame& frame, double traction,
                                     double strain);

LoadFrame frame_of(const GeometrySpec& spec);

}  // namespace cloak
