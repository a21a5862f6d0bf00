#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "cloak/element.hpp"
#include "cloak/mesh.hpp"
#include "cloak/scenarios.hpp"
#include "cloak/sparse.hpp"

namespace cloak {

/// Global DOF layout of the state vector: all xi, then all eta (design nodes only), then the
/// displacement of every load (node-interleaved), then the adjoint field of every load.
struct DofMap {
  int num_nodes = 0;
  int num_loads = 0;
  std::vector<int> design_index;  // node -> design slot or -1
  std::vector<int> design_nodes;  // design slot -> node
  std::vector<char> constrained;  // per global DOF
  std::vector<double> prescribed;
  std::vector<int> free_index;  // global -> reduced, -1 if constrained
  std::vector<int> free_dofs;   // reduced -> global

  int num_design() const { return static_cast<int>(design_nodes.size()); }
  int xi(int node) const { return design_index[node]; }
  int eta(int node) const { return num_design() + design_index[node]; }
  int u(int load, int node, int comp) const { return 2 * num_design() + 2 * (load * num_nodes + node) + comp; }
  int gamma(int load, int node, int comp) const {
    return 2 * num_design() + 2 * ((num_loads + load) * num_nodes + node) + comp;
  }
  int size() const { return 2 * num_design() + 4 * num_loads * num_nodes; }
  int num_free() const { return static_cast<int>(free_dofs.size()); }
  std::string describe(int global) const;
};

/// Nodes pinned against rigid motion for pure-traction loads: the bottom-left corner (both
/// components) and the top-left corner (x component).
struct RigidPins {
  int corner = -1;
  int second = -1;
};
RigidPins rigid_pins(const Mesh& mesh);

/// Dirichlet nodes of a load with their prescribed displacement.
std::vector<std::pair<int, Eigen::Vector2d>> dirichlet_nodes(const Mesh& mesh, const LoadCase& load);

DofMap build_dofmap(const Mesh& mesh, const std::vector<LoadCase>& loads);

/// Adds an extra constraint (value `v`) on a u DOF; rejects DOFs that are not on a Dirichlet
/// boundary of that load. The matching adjoint DOF is pinned to zero.
void constrain_u(DofMap& dofs, const Mesh& mesh, const std::vector<LoadCase>& loads, int load, int node, int comp,
                 double v);

/// Scatters design/u/gamma fields into a full state vector with prescribed values applied.
Eigen::VectorXd initial_state(const DofMap& dofs, const std::vector<Eigen::VectorXd>& u);

struct System {
  Eigen::VectorXd residual;  // reduced (free rows)
  SparseMatrix jacobian;     // reduced, free x free
};

class Assembler {
 public:
  Assembler(const Mesh& mesh, const DofMap& dofs, const std::vector<LoadCase>& loads, const ElementParams& params);

  /// Virtual displacements (2 x nodes, interleaved) and per-load penalties.
  void set_targets(std::vector<Eigen::VectorXd> utilde, std::vector<double> k);

  /// Full-length residual R(Q) = K(Q) Q - F.
  Eigen::VectorXd residual(const Eigen::VectorXd& state) const;
  /// Full Jacobian (all DOFs, constrained included).
  SparseMatrix jacobian(const Eigen::VectorXd& state) const;
  /// Reduced residual and Jacobian on the free DOFs.
  System reduced(const Eigen::VectorXd& state, bool with_jacobian = true) const;

  const DofMap& dofs() const { return dofs_; }
  const std::vector<double>& penalties() const { return k_; }

 private:
  void assemble(const Eigen::VectorXd& state, Eigen::VectorXd* R, std::vector<Eigen::Triplet<double>>* J,
                bool reduce) const;

  const Mesh& mesh_;
  const DofMap& dofs_;
  const std::vector<LoadCase>& loads_;
  ElementParams params_;
  std::vector<ElementBasis> bases_;
  std::vector<Eigen::VectorXd> edge_force_;  // per load, 2 x nodes
  std::vector<Eigen::VectorXd> utilde_;
  std::vector<double> k_;
};

/// Traction load vector of one load over the Neumann outer edges (2 x nodes).
Eigen::VectorXd traction_vector(const Mesh& mesh, const LoadCase& load);

/// Physical stiffness (2 x nodes square) with nodal design fields (xi, eta indexed by node,
/// used on CLOAK triangles only) and stiffened INHOMOGENEITY triangles.
SparseMatrix elasticity_matrix(const Mesh& mesh, const Eigen::VectorXd& xi, const Eigen::VectorXd& eta,
                               const BaseMaterial& base, double stiffness_ratio, int quad_degree, bool homogeneous);

/// P1 mass matrix for vector fields restricted to EXTERIOR triangles (or all when `all`).
SparseMatrix vector_mass(const Mesh& mesh, bool all);

}  // namespace cloak
