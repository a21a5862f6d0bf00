#include "cloak/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>

#include "cloak/error.hpp"

namespace cloak {

const char* to_string(LoadId id) {
  switch (id) {
    case LoadId::XT: return "XT";
    case LoadId::YT: return "YT";
    case LoadId::ST: return "ST";
    case LoadId::XD: return "XD";
    case LoadId::YD: return "YD";
    case LoadId::SD: return "SD";
  }
  return "?";
}

LoadId parse_load_id(const std::string& s) {
  for (LoadId id : {LoadId::XT, LoadId::YT, LoadId::ST, LoadId::XD, LoadId::YD, LoadId::SD}) {
    if (s == to_string(id)) return id;
  }
  throw config_error("unknown load case '" + s + "'");
}

bool LoadCase::is_dirichlet(EdgeTag tag) const {
  if (!is_outer(tag)) return false;
  switch (id) {
    case LoadId::XD: return tag == EdgeTag::OuterLeft || tag == EdgeTag::OuterRight;
    case LoadId::YD: return tag == EdgeTag::OuterTop || tag == EdgeTag::OuterBottom;
    case LoadId::SD: return true;
    default: return false;
  }
}

Eigen::Vector2d LoadCase::traction(const Eigen::Vector2d&, EdgeTag tag) const {
  const double s = magnitude;
  switch (id) {
    case LoadId::XT:
      if (tag == EdgeTag::OuterRight) return {s, 0.0};
      if (tag == EdgeTag::OuterLeft) return {-s, 0.0};
      break;
    case LoadId::YT:
      if (tag == EdgeTag::OuterTop) return {0.0, s};
      if (tag == EdgeTag::OuterBottom) return {0.0, -s};
      break;
    case LoadId::ST:
      if (tag == EdgeTag::OuterRight) return {0.0, s};
      if (tag == EdgeTag::OuterLeft) return {0.0, -s};
      if (tag == EdgeTag::OuterTop) return {s, 0.0};
      if (tag == EdgeTag::OuterBottom) return {-s, 0.0};
      break;
    default: break;
  }
  return Eigen::Vector2d::Zero();
}

Eigen::Vector2d LoadCase::displacement(const Eigen::Vector2d& x) const {
  const Eigen::Vector2d r = x - frame.center;
  switch (id) {
    case LoadId::XD: return {magnitude * r.x(), 0.0};
    case LoadId::YD: return {0.0, magnitude * r.y()};
    case LoadId::SD: return {magnitude * r.y(), 0.0};
    default: return Eigen::Vector2d::Zero();
  }
}

LoadCase make_load(LoadId id, double magnitude, const LoadFrame& frame) {
  LoadCase lc;
  lc.id = id;
  lc.magnitude = magnitude;
  lc.frame = frame;
  return lc;
}

LoadFrame frame_of(const GeometrySpec& spec) { return {spec.center, spec.half_width, spec.half_height}; }

std::vector<std::string> example_loads(int example) {
  if (example == 2) return {"XT", "ST", "MT"};
  if (example == 1 || example == 3 || example == 4) return {"XT", "YT", "ST", "XD", "YD", "SD", "MT", "MD"};
  throw config_error("example must be 1, 2, 3 or 4");
}

std::vector<LoadCase> scenario_loads(int example, const std::string& load, const LoadFrame& frame, double traction,
                                     double strain) {
  const auto allowed = example_loads(example);
  if (std::find(allowed.begin(), allowed.end(), load) == allowed.end()) {
    throw config_error("load " + load + " is not defined for example " + std::to_string(example));
  }
  auto single = [&](LoadId id, double w) {
    LoadCase lc = make_load(id, (id == LoadId::XD || id == LoadId::YD || id == LoadId::SD) ? strain : traction, frame);
    lc.weight = w;
    return lc;
  };
  if (load == "MT") {
    if (example == 2) return {single(LoadId::XT, 0.5), single(LoadId::ST, 0.5)};
    return {single(LoadId::XT, 1.0 / 3.0), single(LoadId::YT, 1.0 / 3.0), single(LoadId::ST, 1.0 / 3.0)};
  }
  if (load == "MD") {
    return {single(LoadId::XD, 1.0 / 3.0), single(LoadId::YD, 1.0 / 3.0), single(LoadId::SD, 1.0 / 3.0)};
  }
  return {single(parse_load_id(load), 1.0)};
}

Scenario make_scenario(int example, const std::string& load, const Config& cfg) {
  Scenario s;
  s.example = example;
  s.load_name = load;
  s.geometry = example_geometry(example);
  if (example == 2) {
    s.solver.m1 = s.solver.m2 = 2.0;
    s.solver.alpha1 = s.solver.alpha2 = 3.0;
  }

  GeometrySpec& g = s.geometry;
  const std::uint64_t seed = cfg.get_uint64("run.seed", 42);
  g.seed = cfg.get_uint64("geometry.seed", seed);
  s.solver.seed = seed;
  g.h = cfg.get_double("geometry.h", g.h);
  g.symmetric = cfg.get_bool("geometry.symmetric", g.symmetric);
  g.hole_ax = cfg.get_double("geometry.hole_ax", g.hole_ax);
  g.hole_ay = cfg.get_double("geometry.hole_ay", g.hole_ay);
  g.cloak_ax = cfg.get_double("geometry.cloak_ax", g.cloak_ax);
  g.cloak_ay = cfg.get_double("geometry.cloak_ay", g.cloak_ay);
  g.cut_major = cfg.get_double("geometry.cut_major", g.cut_major);
  g.cut_minor = cfg.get_double("geometry.cut_minor", g.cut_minor);
  g.carpet_major = cfg.get_double("geometry.carpet_major", g.carpet_major);
  g.carpet_minor = cfg.get_double("geometry.carpet_minor", g.carpet_minor);
  g.inhom_width = cfg.get_double("geometry.inhom_width", g.inhom_width);
  g.inhom_height = cfg.get_double("geometry.inhom_height", g.inhom_height);
  g.cloak_thickness = cfg.get_double("geometry.cloak_thickness", g.cloak_thickness);
  g.angle_deg = cfg.get_double("geometry.angle_deg", g.angle_deg);
  g.disk_count = cfg.get_int("geometry.disk_count", g.disk_count);
  g.disk_rmin = cfg.get_double("geometry.disk_rmin", g.disk_rmin);
  g.disk_rmax = cfg.get_double("geometry.disk_rmax", g.disk_rmax);
  g.disk_clearance = cfg.get_double("geometry.disk_clearance", g.disk_clearance);

  s.base.mu0 = cfg.get_double("material.mu0", s.base.mu0);
  s.base.kappa0 = cfg.get_double("material.kappa0", s.base.kappa0);
  s.stiffness_ratio = cfg.get_double("material.stiffness_ratio", s.stiffness_ratio);
  if (!(s.base.mu0 > 0 && s.base.kappa0 > 0)) throw config_error("base moduli must be positive");
  if (!(s.stiffness_ratio > 0)) throw config_error("stiffness ratio must be positive");

  s.traction = cfg.get_double("load.traction", 1e-2 * s.base.mu0);
  s.strain = cfg.get_double("load.strain", 1e-2);

  SolverConfig& c = s.solver;
  c.k_target = cfg.get_double("solver.k_target", c.k_target);
  c.k0 = cfg.get_double("solver.k0", c.k0);
  c.growth = cfg.get_double("solver.growth", c.growth);
  c.max_bisections = cfg.get_int("solver.max_bisections", c.max_bisections);
  c.newton_tol = cfg.get_double("solver.newton_tol", c.newton_tol);
  c.max_newton_iters = cfg.get_int("solver.max_newton_iters", c.max_newton_iters);
  c.pivot_tol = cfg.get_double("solver.pivot_tol", c.pivot_tol);
  c.normalize_k = cfg.get_bool("solver.normalize_k", c.normalize_k);
  c.early_stop = cfg.get_bool("solver.early_stop", c.early_stop);
  c.early_stop_gain = cfg.get_double("solver.early_stop_gain", c.early_stop_gain);
  c.early_stop_design = cfg.get_double("solver.early_stop_design", c.early_stop_design);
  c.m1 = cfg.get_double("solver.m1", c.m1);
  c.m2 = cfg.get_double("solver.m2", c.m2);
  c.alpha1 = cfg.get_double("solver.alpha1", c.alpha1);
  c.alpha2 = cfg.get_double("solver.alpha2", c.alpha2);
  c.quad_degree = cfg.get_int("solver.quad_degree", c.quad_degree);
  c.verbose = cfg.get_bool("solver.verbose", c.verbose);
  if (!(c.k0 > 0)) throw config_error("solver.k0 must be positive");
  if (!(c.growth > 1)) throw config_error("solver.growth must exceed 1");
  if (!(c.newton_tol > 0)) throw config_error("solver.newton_tol must be positive");
  if (c.quad_degree != 2 && c.quad_degree != 5) throw config_error("solver.quad_degree must be 2 or 5");

  s.loads = scenario_loads(example, load, frame_of(g), s.traction, s.strain);
  if (cfg.has("load.weights")) {
    std::stringstream ss(cfg.get_string("load.weights", ""));
    std::vector<double> w;
    for (std::string tok; std::getline(ss, tok, ',');) {
      try {
        w.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw config_error("load.weights: cannot parse '" + tok + "'");
      }
    }
    if (w.size() != s.loads.size())
      throw config_error("load.weights: expected " + std::to_string(s.loads.size()) + " values");
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (!(w[i] >= 0.0)) throw config_error("load.weights must be non-negative");
      s.loads[i].weight = w[i];
    }
  }
  double total = 0.0;
  for (const auto& l : s.loads) total += l.weight;
  if (!(total > 0.0)) throw config_error("load weights must not all be zero");
  if (std::abs(total - 1.0) > 1e-12) {
    std::cerr << "warning: load weights sum to " << total << ", normalizing\n";
    for (auto& l : s.loads) l.weight /= total;
  }
  return s;
}

}  // namespace cloak
