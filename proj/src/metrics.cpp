#include "cloak/metrics.hpp"

#include <cmath>
#include <cstdio>

#include "cloak/element.hpp"
#include "cloak/error.hpp"

namespace cloak {

namespace {

// Exact integral of the product of two P1 scalars over a triangle of area a.
double p1_inner(const Eigen::Vector3d& f, const Eigen::Vector3d& g, double a) {
  return a / 12.0 * (f.dot(g) + f.sum() * g.sum());
}

}  // namespace

double g_hat(const Eigen::VectorXd& u, const Eigen::VectorXd& utilde, const Mesh& mesh, const std::vector<char>& mask) {
  if (u.size() != 2 * mesh.num_nodes() || utilde.size() != u.size()) throw solver_error("g_hat: field size mismatch");
  double num = 0.0, den = 0.0;
  for (int t = 0; t < mesh.num_tris(); ++t) {
    const bool in = mask.empty() ? mesh.region[t] == Region::Exterior : mask[t] != 0;
    if (!in) continue;
    const auto& v = mesh.tris[t];
    const double a = mesh.area(t);
    for (int c = 0; c < 2; ++c) {
      const Eigen::Vector3d ut(utilde(2 * v[0] + c), utilde(2 * v[1] + c), utilde(2 * v[2] + c));
      const Eigen::Vector3d d = Eigen::Vector3d(u(2 * v[0] + c), u(2 * v[1] + c), u(2 * v[2] + c)) - ut;
      num += p1_inner(d, d, a);
      den += p1_inner(ut, ut, a);
    }
  }
  if (!(den > 0.0)) throw solver_error("g_hat: virtual displacement vanishes on the measurement region");
  return std::sqrt(num / den);
}

double g_hat_multi(const std::vector<double>& ratios, const std::vector<double>& weights) {
  if (ratios.size() != weights.size()) throw solver_error("g_hat_multi: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < ratios.size(); ++i) s += weights[i] * ratios[i];
  return s;
}

double design_metric(const Eigen::VectorXd& xi1, const Eigen::VectorXd& eta1, const Eigen::VectorXd& xi2,
                     const Eigen::VectorXd& eta2, const Mesh& mesh, const MetricWeights& w) {
  double s = 0.0;
  for (int t = 0; t < mesh.num_tris(); ++t) {
    if (mesh.region[t] != Region::Cloak) continue;
    const auto& v = mesh.tris[t];
    const ElementBasis e = basis(mesh.nodes[v[0]], mesh.nodes[v[1]], mesh.nodes[v[2]]);
    const Eigen::Vector3d dx(xi1(v[0]) - xi2(v[0]), xi1(v[1]) - xi2(v[1]), xi1(v[2]) - xi2(v[2]));
    const Eigen::Vector3d de(eta1(v[0]) - eta2(v[0]), eta1(v[1]) - eta2(v[1]), eta1(v[2]) - eta2(v[2]));
    s += w.m1 * p1_inner(dx, dx, e.area) + w.m2 * p1_inner(de, de, e.area);
    s += e.area * (w.alpha1 * (e.G * dx).squaredNorm() + w.alpha2 * (e.G * de).squaredNorm());
  }
  return std::sqrt(std::max(s, 0.0));
}

double auxetic_fraction(const Eigen::VectorXd& xi, const Eigen::VectorXd& eta, const Mesh& mesh,
                        const BaseMaterial& base) {
  double aux = 0.0, total = 0.0;
  for (int t = 0; t < mesh.num_tris(); ++t) {
    if (mesh.region[t] != Region::Cloak) continue;
    const auto& v = mesh.tris[t];
    const double a = mesh.area(t);
    const Moduli m = moduli(base, (xi(v[0]) + xi(v[1]) + xi(v[2])) / 3.0, (eta(v[0]) + eta(v[1]) + eta(v[2])) / 3.0);
    total += a;
    if (is_auxetic(m.mu, m.kappa)) aux += a;
  }
  return total > 0.0 ? aux / total : 0.0;
}

std::string EfficacyTable::to_csv() const {
  std::string out = "design";
  for (const auto& c : cols) out += "," + c;
  out += ",average\n";
  char buf[64];
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out += rows[r];
    double sum = 0.0;
    for (double v : values[r]) {
      std::snprintf(buf, sizeof buf, ",%.1f", 100.0 * v);
      out += buf;
      sum += v;
    }
    std::snprintf(buf, sizeof buf, ",%.1f\n", 100.0 * sum / static_cast<double>(values[r].size()));
    out += buf;
  }
  return out;
}

}  // namespace cloak
