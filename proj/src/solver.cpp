#include "cloak/solver.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>

#include "cloak/error.hpp"

namespace cloak {

DesignField DesignField::zero(const Mesh& mesh) {
  return {Eigen::VectorXd::Zero(mesh.num_nodes()), Eigen::VectorXd::Zero(mesh.num_nodes())};
}

Eigen::VectorXd solve_elastic(const Mesh& mesh, const LoadCase& load, const SparseMatrix& K, double pivot_tol) {
  const int n = 2 * mesh.num_nodes();
  std::vector<char> fixed(n, 0);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  if (load.pure_traction()) {
    const RigidPins p = rigid_pins(mesh);
    fixed[2 * p.corner] = fixed[2 * p.corner + 1] = fixed[2 * p.second] = 1;
  } else {
    for (const auto& [node, v] : dirichlet_nodes(mesh, load)) {
      fixed[2 * node] = fixed[2 * node + 1] = 1;
      u.segment<2>(2 * node) = v;
    }
  }
  Eigen::VectorXd f = traction_vector(mesh, load);
  if (load.body_force.squaredNorm() > 0.0) {
    for (int t = 0; t < mesh.num_tris(); ++t) {
      for (int v : mesh.tris[t]) f.segment<2>(2 * v) += mesh.area(t) / 3.0 * load.body_force;
    }
  }
  std::vector<int> index(n, -1);
  int nf = 0;
  for (int i = 0; i < n; ++i) {
    if (!fixed[i]) index[i] = nf++;
  }
  const Eigen::VectorXd lifted = K * u;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(K.nonZeros());
  for (int j = 0; j < K.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(K, j); it; ++it) {
      if (index[it.row()] >= 0 && index[j] >= 0) trip.emplace_back(index[it.row()], index[j], it.value());
    }
  }
  SparseMatrix Kr(nf, nf);
  Kr.setFromTriplets(trip.begin(), trip.end());
  Eigen::VectorXd rhs(nf);
  for (int i = 0; i < n; ++i) {
    if (index[i] >= 0) rhs(index[i]) = f(i) - lifted(i);
  }
  std::vector<int> global(nf);
  for (int i = 0; i < n; ++i) {
    if (index[i] >= 0) global[index[i]] = i;
  }
  const SparseLU lu = sparse_lu(Kr, pivot_tol, [&](int r) {
    const int g = global[r];
    return std::string(g % 2 ? "u_y" : "u_x") + " at node " + std::to_string(g / 2);
  });
  const Eigen::VectorXd x = back_solve(lu, rhs);
  for (int i = 0; i < n; ++i) {
    if (index[i] >= 0) u(i) = x(index[i]);
  }
  return u;
}

Eigen::VectorXd solve_virtual(const Geometry& geo, const LoadCase& load, const BaseMaterial& base, double pivot_tol) {
  const Mesh& filled = geo.filled;
  const SparseMatrix K = elasticity_matrix(filled, {}, {}, base, 1.0, 2, true);
  const Eigen::VectorXd uf = solve_elastic(filled, load, K, pivot_tol);
  const Mesh& phys = geo.physical;
  Eigen::VectorXd u(2 * phys.num_nodes());
  if (!geo.filled_node.empty()) {
    for (int i = 0; i < phys.num_nodes(); ++i) u.segment<2>(2 * i) = uf.segment<2>(2 * geo.filled_node[i]);
    return u;
  }
  const PointLocator locator(filled);
  for (int i = 0; i < phys.num_nodes(); ++i) {
    Eigen::Vector3d bary;
    const int t = locator.locate(phys.nodes[i], bary, 1e-8);
    if (t < 0) throw mesh_error("virtual transfer: node " + std::to_string(i) + " lies outside the virtual body");
    const auto& v = filled.tris[t];
    u.segment<2>(2 * i) = bary(0) * uf.segment<2>(2 * v[0]) + bary(1) * uf.segment<2>(2 * v[1]) +
                          bary(2) * uf.segment<2>(2 * v[2]);
  }
  return u;
}

Eigen::VectorXd solve_nocloak(const Geometry& geo, const LoadCase& load, const BaseMaterial& base,
                              double stiffness_ratio, double pivot_tol) {
  const SparseMatrix K = elasticity_matrix(geo.physical, {}, {}, base, stiffness_ratio, 2, false);
  return solve_elastic(geo.physical, load, K, pivot_tol);
}

Eigen::VectorXd solve_design(const Mesh& mesh, const LoadCase& load, const DesignField& design,
                             const BaseMaterial& base, double stiffness_ratio, int quad_degree, double pivot_tol) {
  const SparseMatrix K = elasticity_matrix(mesh, design.xi, design.eta, base, stiffness_ratio, quad_degree, false);
  return solve_elastic(mesh, load, K, pivot_tol);
}

std::vector<double> penalties(double k, const Mesh& mesh, const std::vector<Eigen::VectorXd>& utilde, bool normalize) {
  std::vector<double> out;
  const SparseMatrix M = vector_mass(mesh, false);
  for (const auto& ut : utilde) {
    if (!normalize) {
      out.push_back(k);
      continue;
    }
    const double n2 = ut.dot(M * ut);
    if (!(n2 > 0.0)) throw solver_error("cannot normalize k: virtual displacement vanishes on the exterior");
    out.push_back(k / n2);
  }
  return out;
}

namespace {

struct Extracted {
  DesignField design;
  std::vector<Eigen::VectorXd> u, gamma;
};

Extracted extract(const DofMap& dofs, const Eigen::VectorXd& q, const Mesh& mesh) {
  Extracted e;
  e.design = DesignField::zero(mesh);
  for (int s = 0; s < dofs.num_design(); ++s) {
    e.design.xi(dofs.design_nodes[s]) = q(s);
    e.design.eta(dofs.design_nodes[s]) = q(dofs.num_design() + s);
  }
  for (int l = 0; l < dofs.num_loads; ++l) {
    e.u.push_back(q.segment(dofs.u(l, 0, 0), 2 * dofs.num_nodes));
    e.gamma.push_back(q.segment(dofs.gamma(l, 0, 0), 2 * dofs.num_nodes));
  }
  return e;
}

struct NewtonOutcome {
  bool converged = false;
  Eigen::VectorXd state;
  NewtonLog log;
};

// Convergence is measured against max(r0, 1e-3 * load_scale): a purely relative test cannot be met
// when the initial residual is already at round-off level (vanishing k).
NewtonOutcome newton(const Assembler& assembler, const DofMap& dofs, Eigen::VectorXd state, const SolverConfig& cfg,
                     double k, double load_scale) {
  NewtonOutcome out;
  out.log.k = k;
  System sys = assembler.reduced(state);
  const double r0 = sys.residual.lpNorm<Eigen::Infinity>();
  out.log.residuals.push_back(r0);
  if (cfg.verbose) std::fprintf(stderr, "k=%.6e iter=0 |R|=%.6e\n", k, r0);
  const double ref = std::max(r0, 1e-3 * load_scale);
  if (r0 <= cfg.newton_tol * ref) {
    out.converged = true;
    out.log.converged = true;
    out.state = std::move(state);
    return out;
  }
  double prev = r0;
  for (int it = 1; it <= cfg.max_newton_iters; ++it) {
    Eigen::VectorXd dx;
    try {
      const SparseLU lu = sparse_lu(sys.jacobian, cfg.pivot_tol, [&](int r) { return dofs.describe(dofs.free_dofs[r]); });
      dx = back_solve(lu, -sys.residual);
    } catch (const Error& e) {
      if (cfg.verbose) std::fprintf(stderr, "k=%.6e linear solve failed: %s\n", k, e.what());
      break;
    }
    for (int i = 0; i < dofs.num_free(); ++i) state(dofs.free_dofs[i]) += dx(i);
    sys = assembler.reduced(state);
    const double r = sys.residual.lpNorm<Eigen::Infinity>();
    out.log.residuals.push_back(r);
    if (cfg.verbose) std::fprintf(stderr, "k=%.6e iter=%d |R|=%.6e\n", k, it, r);
    if (!std::isfinite(r) || r > 1e6 * r0) break;
    if (r <= cfg.newton_tol * ref) {
      out.converged = true;
      break;
    }
    // Round-off floor: no further progress although the residual is already tiny.
    if (it >= 3 && r > 0.5 * prev && r <= 1e3 * cfg.newton_tol * ref) {
      out.converged = true;
      break;
    }
    prev = r;
  }
  out.log.converged = out.converged;
  out.state = std::move(state);
  return out;
}

}  // namespace

RunResult newton_continuation(const Problem& pb) {
  const Geometry& geo = pb.geometry;
  const Mesh& mesh = geo.physical;
  const SolverConfig& cfg = pb.config;
  RunResult res;

  for (const auto& l : pb.loads) {
    res.utilde.push_back(solve_virtual(geo, l, pb.base, cfg.pivot_tol));
    res.u_nocloak.push_back(solve_nocloak(geo, l, pb.base, pb.stiffness_ratio, cfg.pivot_tol));
  }
  std::vector<double> weights;
  for (std::size_t l = 0; l < pb.loads.size(); ++l) {
    res.g_nocloak.push_back(g_hat(res.u_nocloak[l], res.utilde[l], mesh));
    weights.push_back(pb.loads[l].weight);
  }
  res.g_multi_nocloak = g_hat_multi(res.g_nocloak, weights);

  const DofMap dofs = build_dofmap(mesh, pb.loads);
  ElementParams params;
  params.base = pb.base;
  params.m1 = cfg.m1;
  params.m2 = cfg.m2;
  params.alpha1 = cfg.alpha1;
  params.alpha2 = cfg.alpha2;
  params.stiffness_ratio = pb.stiffness_ratio;
  params.quad_degree = cfg.quad_degree;
  Assembler assembler(mesh, dofs, pb.loads, params);

  Eigen::VectorXd state = initial_state(dofs, res.u_nocloak);
  // Residual of the zero state without penalty: the size of the applied loads.
  assembler.set_targets(res.utilde, std::vector<double>(pb.loads.size(), 0.0));
  const double load_scale = assembler.reduced(initial_state(dofs, {}), false).residual.lpNorm<Eigen::Infinity>();
  const MetricWeights mw{cfg.m1, cfg.m2, cfg.alpha1, cfg.alpha2};
  const DesignField zero = DesignField::zero(mesh);

  double k_prev = 0.0;
  double k_next = std::min(cfg.k0, cfg.k_target);
  int bisections = 0;
  int step = 0;
  DesignField prev_design = zero;
  double prev_g = res.g_multi_nocloak;
  res.converged = false;
  res.message = "not started";

  while (true) {
    assembler.set_targets(res.utilde, penalties(k_next, mesh, res.utilde, cfg.normalize_k));
    NewtonOutcome nt = newton(assembler, dofs, state, cfg, k_next, load_scale);
    res.newton.push_back(nt.log);
    if (!nt.converged) {
      if (++bisections > cfg.max_bisections) {
        res.message = "Newton failed to converge at k=" + std::to_string(k_next) + " after " +
                      std::to_string(cfg.max_bisections) + " step bisections";
        break;
      }
      k_next = k_prev > 0.0 ? std::sqrt(k_prev * k_next) : k_next / cfg.growth;
      continue;
    }
    state = std::move(nt.state);
    k_prev = k_next;
    ++step;

    const Extracted ex = extract(dofs, state, mesh);
    TraceRow row;
    row.step = step;
    row.k = k_prev;
    row.newton_iters = static_cast<int>(nt.log.residuals.size()) - 1;
    row.bisections = bisections;
    row.residual = nt.log.residuals.back();
    for (std::size_t l = 0; l < pb.loads.size(); ++l) {
      const Eigen::VectorXd u = solve_design(mesh, pb.loads[l], ex.design, pb.base, pb.stiffness_ratio,
                                             cfg.quad_degree, cfg.pivot_tol);
      row.g.push_back(g_hat(u, res.utilde[l], mesh));
    }
    row.g_multi = g_hat_multi(row.g, weights);
    row.design_metric = design_metric(ex.design.xi, ex.design.eta, zero.xi, zero.eta, mesh, mw);
    res.trace.push_back(row);
    if (cfg.verbose) {
      std::fprintf(stderr, "step %d k=%.3e iters=%d g=%.6f d=%.6f\n", step, k_prev, row.newton_iters, row.g_multi,
                   row.design_metric);
    }
    bisections = 0;

    bool stop = k_prev >= cfg.k_target;
    if (cfg.early_stop && step > 1) {
      const double gain = (prev_g - row.g_multi) / prev_g;
      const double change = design_metric(ex.design.xi, ex.design.eta, prev_design.xi, prev_design.eta, mesh, mw);
      const double base_norm =
          design_metric(prev_design.xi, prev_design.eta, zero.xi, zero.eta, mesh, mw);
      if (gain < cfg.early_stop_gain && base_norm > 0.0 && change / base_norm > cfg.early_stop_design) {
        stop = true;
        res.message = "early stop";
      }
    }
    prev_g = row.g_multi;
    prev_design = ex.design;
    if (stop) {
      res.converged = true;
      if (res.message != "early stop") res.message = "reached target k";
      break;
    }
    k_next = std::min(k_prev * cfg.growth, cfg.k_target);
  }

  res.k_reached = k_prev;
  res.state = state;
  const Extracted ex = extract(dofs, state, mesh);
  res.design = ex.design;
  res.u = ex.u;
  res.gamma = ex.gamma;
  res.penalties = penalties(k_prev > 0 ? k_prev : cfg.k0, mesh, res.utilde, cfg.normalize_k);
  res.g.clear();
  for (std::size_t l = 0; l < pb.loads.size(); ++l) {
    const Eigen::VectorXd u =
        solve_design(mesh, pb.loads[l], res.design, pb.base, pb.stiffness_ratio, cfg.quad_degree, cfg.pivot_tol);
    res.g.push_back(g_hat(u, res.utilde[l], mesh));
  }
  res.g_multi = g_hat_multi(res.g, weights);
  return res;
}

std::string trace_csv(const RunResult& result, const std::vector<LoadCase>& loads) {
  std::string out = "step,k,newton_iters,bisections,residual,g_multi";
  for (const auto& l : loads) out += std::string(",g_") + to_string(l.id);
  out += ",design_metric\n";
  char buf[160];
  for (const auto& r : result.trace) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%d,%d,%.17g,%.17g", r.step, r.k, r.newton_iters, r.bisections,
                  r.residual, r.g_multi);
    out += buf;
    for (double g : r.g) {
      std::snprintf(buf, sizeof buf, ",%.17g", g);
      out += buf;
    }
    std::snprintf(buf, sizeof buf, ",%.17g\n", r.design_metric);
    out += buf;
  }
  return out;
}

EfficacyTable efficacy_table(const Geometry& geo, const std::vector<std::string>& names,
                             const std::vector<DesignField>& designs, const std::vector<LoadCase>& service,
                             const BaseMaterial& base, double stiffness_ratio, int quad_degree) {
  EfficacyTable table;
  table.rows = names;
  for (const auto& l : service) table.cols.push_back(to_string(l.id));
  std::vector<Eigen::VectorXd> utilde;
  for (const auto& l : service) utilde.push_back(solve_virtual(geo, l, base));
  for (const auto& d : designs) {
    std::vector<double> row;
    for (std::size_t j = 0; j < service.size(); ++j) {
      const Eigen::VectorXd u = solve_design(geo.physical, service[j], d, base, stiffness_ratio, quad_degree);
      row.push_back(g_hat(u, utilde[j], geo.physical));
    }
    table.values.push_back(row);
  }
  return table;
}

}  // namespace cloak
