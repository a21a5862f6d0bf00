#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "cloak/material.hpp"
#include "cloak/mesh.hpp"

namespace cloak {

/// Fields written to a legacy VTK file. `xi`/`eta` are nodal (empty means base material);
/// `u` and `gamma` are node-interleaved, one entry per name in `loads` (gamma may be empty).
struct FieldSet {
  std::vector<std::string> loads;
  std::vector<Eigen::VectorXd> u;
  std::vector<Eigen::VectorXd> gamma;
  Eigen::VectorXd xi, eta;
  BaseMaterial base;
  double stiffness_ratio = 1e3;
};

/// Frobenius norm of the plane-strain stress (including the out-of-plane component) on triangle t.
double stress_norm(const Mesh& mesh, int t, const Eigen::VectorXd& u, const FieldSet& f);

/// Legacy ASCII unstructured grid: nodal u_<load>, gamma_<load>, xi, eta, mu, kappa, nu;
/// cell data stress_<load>, region, auxetic.
void write_vtk(const Mesh& mesh, const FieldSet& fields, const std::string& path);

struct VtkCounts {
  int points = 0;
  int cells = 0;
};

/// Point and cell counts declared in a legacy VTK file.
VtkCounts read_vtk_counts(const std::string& path);

/// FNV-1a hash of a file's bytes.
std::string file_hash(const std::string& path);

/// Writes text to a file, throwing an I/O error on failure.
void write_text(const std::string& path, const std::string& text);

}  // namespace cloak
