#include "cloak/assembly.hpp"

#include <algorithm>
#include <cmath>

#include "cloak/error.hpp"

namespace cloak {

using Triplets = std::vector<Eigen::Triplet<double>>;

std::string DofMap::describe(int g) const {
  const int nd = num_design();
  if (g < nd) return "xi at node " + std::to_string(design_nodes[g]);
  if (g < 2 * nd) return "eta at node " + std::to_string(design_nodes[g - nd]);
  const int r = g - 2 * nd;
  const int block = r / (2 * num_nodes);
  const int node = (r % (2 * num_nodes)) / 2;
  const char comp = (r % 2) ? 'y' : 'x';
  const bool adj = block >= num_loads;
  return std::string(adj ? "gamma" : "u") + "_" + comp + " of load " + std::to_string(adj ? block - num_loads : block) +
         " at node " + std::to_string(node);
}

RigidPins rigid_pins(const Mesh& mesh) {
  const auto box = bounding_box(mesh);
  RigidPins p;
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    const auto& x = mesh.nodes[i];
    if (x.x() == box[0] && x.y() == box[2]) p.corner = i;
    if (x.x() == box[0] && x.y() == box[3]) p.second = i;
  }
  if (p.corner < 0 || p.second < 0) throw mesh_error("rigid-body pinning needs the left rectangle corners as nodes");
  return p;
}

std::vector<std::pair<int, Eigen::Vector2d>> dirichlet_nodes(const Mesh& mesh, const LoadCase& load) {
  std::vector<char> mark(mesh.nodes.size(), 0);
  for (const auto& e : mesh.bedges) {
    if (load.is_dirichlet(e.tag)) mark[e.a] = mark[e.b] = 1;
  }
  std::vector<std::pair<int, Eigen::Vector2d>> out;
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    if (mark[i]) out.emplace_back(i, load.displacement(mesh.nodes[i]));
  }
  return out;
}

namespace {

void finalize_free(DofMap& d) {
  d.free_index.assign(d.size(), -1);
  d.free_dofs.clear();
  for (int g = 0; g < d.size(); ++g) {
    if (!d.constrained[g]) {
      d.free_index[g] = static_cast<int>(d.free_dofs.size());
      d.free_dofs.push_back(g);
    }
  }
}

}  // namespace

DofMap build_dofmap(const Mesh& mesh, const std::vector<LoadCase>& loads) {
  DofMap d;
  d.num_nodes = mesh.num_nodes();
  d.num_loads = static_cast<int>(loads.size());
  d.design_index.assign(d.num_nodes, -1);
  std::vector<char> in_cloak(d.num_nodes, 0);
  for (int t = 0; t < mesh.num_tris(); ++t) {
    if (mesh.region[t] == Region::Cloak) {
      for (int v : mesh.tris[t]) in_cloak[v] = 1;
    }
  }
  for (int i = 0; i < d.num_nodes; ++i) {
    if (in_cloak[i]) {
      d.design_index[i] = static_cast<int>(d.design_nodes.size());
      d.design_nodes.push_back(i);
    }
  }
  d.constrained.assign(d.size(), 0);
  d.prescribed.assign(d.size(), 0.0);
  for (int l = 0; l < d.num_loads; ++l) {
    auto fix = [&](int node, int comp, double v) {
      d.constrained[d.u(l, node, comp)] = 1;
      d.prescribed[d.u(l, node, comp)] = v;
      d.constrained[d.gamma(l, node, comp)] = 1;
      d.prescribed[d.gamma(l, node, comp)] = 0.0;
    };
    if (loads[l].pure_traction()) {
      const RigidPins p = rigid_pins(mesh);
      fix(p.corner, 0, 0.0);
      fix(p.corner, 1, 0.0);
      fix(p.second, 0, 0.0);
    } else {
      for (const auto& [node, v] : dirichlet_nodes(mesh, loads[l])) {
        fix(node, 0, v.x());
        fix(node, 1, v.y());
      }
    }
  }
  finalize_free(d);
  return d;
}

void constrain_u(DofMap& dofs, const Mesh& mesh, const std::vector<LoadCase>& loads, int load, int node, int comp,
                 double v) {
  bool on_dirichlet = false;
  for (const auto& [n, val] : dirichlet_nodes(mesh, loads.at(load))) on_dirichlet |= (n == node);
  if (!on_dirichlet) {
    throw config_error("constraint on node " + std::to_string(node) + " which is not on a Dirichlet boundary");
  }
  dofs.constrained[dofs.u(load, node, comp)] = 1;
  dofs.prescribed[dofs.u(load, node, comp)] = v;
  dofs.constrained[dofs.gamma(load, node, comp)] = 1;
  dofs.prescribed[dofs.gamma(load, node, comp)] = 0.0;
  finalize_free(dofs);
}

Eigen::VectorXd initial_state(const DofMap& dofs, const std::vector<Eigen::VectorXd>& u) {
  Eigen::VectorXd q = Eigen::VectorXd::Zero(dofs.size());
  for (int l = 0; l < dofs.num_loads && l < static_cast<int>(u.size()); ++l) {
    q.segment(dofs.u(l, 0, 0), 2 * dofs.num_nodes) = u[l];
  }
  for (int g = 0; g < dofs.size(); ++g) {
    if (dofs.constrained[g]) q(g) = dofs.prescribed[g];
  }
  return q;
}

Eigen::VectorXd traction_vector(const Mesh& mesh, const LoadCase& load) {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(2 * mesh.num_nodes());
  for (const auto& e : mesh.bedges) {
    if (!is_outer(e.tag) || load.is_dirichlet(e.tag)) continue;
    const EdgeTag tag = e.tag;
    const Eigen::Vector4d fe =
        edge_traction(mesh.nodes[e.a], mesh.nodes[e.b], [&](const Eigen::Vector2d& x) { return load.traction(x, tag); });
    f.segment<2>(2 * e.a) += fe.head<2>();
    f.segment<2>(2 * e.b) += fe.tail<2>();
  }
  return f;
}

Assembler::Assembler(const Mesh& mesh, const DofMap& dofs, const std::vector<LoadCase>& loads,
                     const ElementParams& params)
    : mesh_(mesh), dofs_(dofs), loads_(loads), params_(params) {
  bases_.reserve(mesh.tris.size());
  for (const auto& t : mesh.tris) bases_.push_back(basis(mesh.nodes[t[0]], mesh.nodes[t[1]], mesh.nodes[t[2]]));
  for (const auto& l : loads) edge_force_.push_back(traction_vector(mesh, l));
  utilde_.assign(loads.size(), Eigen::VectorXd::Zero(2 * mesh.num_nodes()));
  k_.assign(loads.size(), 0.0);
}

void Assembler::set_targets(std::vector<Eigen::VectorXd> utilde, std::vector<double> k) {
  if (utilde.size() != loads_.size() || k.size() != loads_.size()) throw solver_error("target count mismatch");
  utilde_ = std::move(utilde);
  k_ = std::move(k);
}

void Assembler::assemble(const Eigen::VectorXd& q, Eigen::VectorXd* R, Triplets* J, bool reduce) const {
  if (q.size() != dofs_.size()) throw solver_error("state vector has wrong length");
  auto idx = [&](int g) { return reduce ? dofs_.free_index[g] : g; };
  auto add = [&](int r, int c, double v) {
    const int rr = idx(r), cc = idx(c);
    if (rr >= 0 && cc >= 0) J->emplace_back(rr, cc, v);
  };
  auto add_sym = [&](int r, int c, double v) {
    add(r, c, v);
    add(c, r, v);
  };
  if (R) R->setZero(dofs_.size());

  for (int t = 0; t < mesh_.num_tris(); ++t) {
    const auto& v = mesh_.tris[t];
    const Region region = mesh_.region[t];
    const bool design = region == Region::Cloak;
    Eigen::Vector3d qxi = Eigen::Vector3d::Zero(), qeta = Eigen::Vector3d::Zero();
    std::array<int, 3> ixi{}, ieta{};
    if (design) {
      for (int a = 0; a < 3; ++a) {
        ixi[a] = dofs_.xi(v[a]);
        ieta[a] = dofs_.eta(v[a]);
        qxi(a) = q(ixi[a]);
        qeta(a) = q(ieta[a]);
      }
    }
    for (int l = 0; l < dofs_.num_loads; ++l) {
      const double w = loads_[l].weight;
      ElementParams p = params_;
      p.k = k_[l];
      std::array<int, 6> iu{}, ig{};
      Vec6 qu, qg, ut;
      for (int a = 0; a < 3; ++a) {
        for (int c = 0; c < 2; ++c) {
          iu[2 * a + c] = dofs_.u(l, v[a], c);
          ig[2 * a + c] = dofs_.gamma(l, v[a], c);
          qu(2 * a + c) = q(iu[2 * a + c]);
          qg(2 * a + c) = q(ig[2 * a + c]);
          ut(2 * a + c) = utilde_[l](2 * v[a] + c);
        }
      }
      const ElementBlocks k = element_blocks(bases_[t], region, qxi, qeta, qg, qu, ut, loads_[l].body_force, p);

      if (R) {
        const Vec6 ru = w * (k.Kuu * qu + k.Kugamma * qg - k.Fu);
        const Vec6 rg = w * (k.Kugamma * qu - k.Fgamma);
        for (int i = 0; i < 6; ++i) {
          (*R)(iu[i]) += ru(i);
          (*R)(ig[i]) += rg(i);
        }
        if (design) {
          Eigen::Vector3d rxi = w * k.Kxiu * qu;
          Eigen::Vector3d reta = w * k.Ketau * qu;
          if (l == 0) {
            rxi += k.Kxixi * qxi;
            reta += k.Ketaeta * qeta;
          }
          for (int a = 0; a < 3; ++a) {
            (*R)(ixi[a]) += rxi(a);
            (*R)(ieta[a]) += reta(a);
          }
        }
      }
      if (J) {
        for (int i = 0; i < 6; ++i) {
          for (int j = 0; j < 6; ++j) {
            if (k.Kuu(i, j) != 0.0) add(iu[i], iu[j], w * k.Kuu(i, j));
            add_sym(iu[i], ig[j], w * k.Kugamma(i, j));
          }
        }
        if (design) {
          for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
              double jxx = w * k.Kbar_xixi(a, b), jee = w * k.Kbar_etaeta(a, b);
              if (l == 0) {
                jxx += k.Kxixi(a, b);
                jee += k.Ketaeta(a, b);
              }
              add(ixi[a], ixi[b], jxx);
              add(ieta[a], ieta[b], jee);
            }
            for (int i = 0; i < 6; ++i) {
              add_sym(ixi[a], iu[i], w * k.Kxiu(a, i));
              add_sym(ixi[a], ig[i], w * k.Kxigamma(a, i));
              add_sym(ieta[a], iu[i], w * k.Ketau(a, i));
              add_sym(ieta[a], ig[i], w * k.Ketagamma(a, i));
            }
          }
        }
      }
    }
  }
  if (R) {
    for (int l = 0; l < dofs_.num_loads; ++l) {
      R->segment(dofs_.gamma(l, 0, 0), 2 * dofs_.num_nodes) += loads_[l].weight * edge_force_[l];
    }
  }
}

Eigen::VectorXd Assembler::residual(const Eigen::VectorXd& state) const {
  Eigen::VectorXd R;
  assemble(state, &R, nullptr, false);
  return R;
}

SparseMatrix Assembler::jacobian(const Eigen::VectorXd& state) const {
  Triplets trip;
  assemble(state, nullptr, &trip, false);
  SparseMatrix J(dofs_.size(), dofs_.size());
  J.setFromTriplets(trip.begin(), trip.end());
  return J;
}

System Assembler::reduced(const Eigen::VectorXd& state, bool with_jacobian) const {
  Eigen::VectorXd R;
  Triplets trip;
  assemble(state, &R, with_jacobian ? &trip : nullptr, true);
  System s;
  s.residual.resize(dofs_.num_free());
  for (int i = 0; i < dofs_.num_free(); ++i) s.residual(i) = R(dofs_.free_dofs[i]);
  if (with_jacobian) {
    s.jacobian.resize(dofs_.num_free(), dofs_.num_free());
    s.jacobian.setFromTriplets(trip.begin(), trip.end());
  }
  return s;
}

SparseMatrix elasticity_matrix(const Mesh& mesh, const Eigen::VectorXd& xi, const Eigen::VectorXd& eta,
                               const BaseMaterial& base, double stiffness_ratio, int quad_degree, bool homogeneous) {
  const QuadRule& rule = triangle_rule(quad_degree);
  Triplets trip;
  trip.reserve(36 * mesh.tris.size());
  for (int t = 0; t < mesh.num_tris(); ++t) {
    const auto& v = mesh.tris[t];
    const ElementBasis e = basis(mesh.nodes[v[0]], mesh.nodes[v[1]], mesh.nodes[v[2]]);
    const Region region = homogeneous ? Region::Exterior : mesh.region[t];
    Mat6 K;
    if (region == Region::Cloak && xi.size() && eta.size()) {
      const Eigen::Vector3d qxi(xi(v[0]), xi(v[1]), xi(v[2])), qeta(eta(v[0]), eta(v[1]), eta(v[2]));
      K.setZero();
      for (std::size_t q = 0; q < rule.weight.size(); ++q) {
        const WorkMatrices W = work_matrices(e, rule.bary[q], qxi, qeta, base);
        K += rule.weight[q] * e.area * (W.W1 + W.W2);
      }
    } else {
      K = elastic_stiffness(e, base, region == Region::Inhomogeneity ? stiffness_ratio : 1.0);
    }
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) trip.emplace_back(2 * v[i / 2] + i % 2, 2 * v[j / 2] + j % 2, K(i, j));
    }
  }
  SparseMatrix K(2 * mesh.num_nodes(), 2 * mesh.num_nodes());
  K.setFromTriplets(trip.begin(), trip.end());
  return K;
}

SparseMatrix vector_mass(const Mesh& mesh, bool all) {
  Triplets trip;
  for (int t = 0; t < mesh.num_tris(); ++t) {
    if (!all && mesh.region[t] != Region::Exterior) continue;
    const auto& v = mesh.tris[t];
    const double a = mesh.area(t);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const double m = a * (i == j ? 2.0 : 1.0) / 12.0;
        trip.emplace_back(2 * v[i], 2 * v[j], m);
        trip.emplace_back(2 * v[i] + 1, 2 * v[j] + 1, m);
      }
    }
  }
  SparseMatrix M(2 * mesh.num_nodes(), 2 * mesh.num_nodes());
  M.setFromTriplets(trip.begin(), trip.end());
  return M;
}

}  // namespace cloak
