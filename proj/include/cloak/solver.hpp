#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "cloak/assembly.hpp"
#include "cloak/geometry.hpp"
#include "cloak/metrics.hpp"
#include "cloak/scenarios.hpp"

namespace cloak {

/// Nodal design fields on a mesh (zero away from the cloak).
struct DesignField {
  Eigen::VectorXd xi;
  Eigen::VectorXd eta;
  static DesignField zero(const Mesh& mesh);
};

/// Linear elastic solve of one load with stiffness `K` (2 x nodes), Dirichlet data by elimination
/// and rigid-body pinning for pure-traction loads.
Eigen::VectorXd solve_elastic(const Mesh& mesh, const LoadCase& load, const SparseMatrix& K, double pivot_tol = 1e-14);

/// Virtual displacement: homogeneous solve on the filled mesh, transferred to physical nodes.
Eigen::VectorXd solve_virtual(const Geometry& geo, const LoadCase& load, const BaseMaterial& base,
                              double pivot_tol = 1e-14);

/// No-cloak displacement on the physical mesh (zero design, stiffened inhomogeneities).
Eigen::VectorXd solve_nocloak(const Geometry& geo, const LoadCase& load, const BaseMaterial& base,
                              double stiffness_ratio, double pivot_tol = 1e-14);

/// Displacement of the physical body with a frozen design.
Eigen::VectorXd solve_design(const Mesh& mesh, const LoadCase& load, const DesignField& design,
                             const BaseMaterial& base, double stiffness_ratio, int quad_degree = 2,
                             double pivot_tol = 1e-14);

struct TraceRow {
  int step = 0;
  double k = 0.0;
  int newton_iters = 0;
  int bisections = 0;
  double residual = 0.0;
  double g_multi = 0.0;
  std::vector<double> g;
  double design_metric = 0.0;
};

struct NewtonLog {
  double k = 0.0;
  bool converged = false;
  std::vector<double> residuals;  // infinity norms, starting with the initial residual
};

struct RunResult {
  bool converged = false;
  std::string message;
  double k_reached = 0.0;
  DesignField design;
  std::vector<Eigen::VectorXd> u, gamma, utilde, u_nocloak;
  std::vector<double> penalties;
  std::vector<double> g, g_nocloak;
  double g_multi = 0.0, g_multi_nocloak = 0.0;
  std::vector<TraceRow> trace;
  std::vector<NewtonLog> newton;
  Eigen::VectorXd state;
};

/// Optimization problem assembled from a geometry, loads and material data.
struct Problem {
  const Geometry& geometry;
  std::vector<LoadCase> loads;
  BaseMaterial base;
  double stiffness_ratio = 1e3;
  SolverConfig config;
};

/// Newton's method on the coupled optimality system with load control in k.
RunResult newton_continuation(const Problem& problem);

/// Trace as CSV: step,k,newton_iters,bisections,residual,g_multi,g_<load>...,design_metric.
std::string trace_csv(const RunResult& result, const std::vector<LoadCase>& loads);

/// Efficacy of frozen designs under service loads (one linear solve per cell).
EfficacyTable efficacy_table(const Geometry& geo, const std::vector<std::string>& names,
                             const std::vector<DesignField>& designs, const std::vector<LoadCase>& service,
                             const BaseMaterial& base, double stiffness_ratio, int quad_degree = 2);

/// Per-load penalties: k / ||utilde||^2 over the exterior when normalizing, else k.
std::vector<double> penalties(double k, const Mesh& mesh, const std::vector<Eigen::VectorXd>& utilde, bool normalize);

}  // namespace cloak
