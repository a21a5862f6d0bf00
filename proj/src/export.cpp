#include "cloak/export.hpp"

#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include "cloak/config.hpp"
#include "cloak/element.hpp"
#include "cloak/error.hpp"

namespace cloak {

namespace {

double nodal(const Eigen::VectorXd& v, int n) { return v.size() == 0 ? 0.0 : v(n); }

Moduli element_moduli(const Mesh& mesh, int t, const FieldSet& f) {
  const auto& v = mesh.tris[t];
  double xi = 0.0, eta = 0.0;
  for (int a : v) {
    xi += nodal(f.xi, a) / 3.0;
    eta += nodal(f.eta, a) / 3.0;
  }
  Moduli m = moduli(f.base, xi, eta);
  if (mesh.region[t] == Region::Inhomogeneity) {
    m.mu *= f.stiffness_ratio;
    m.kappa *= f.stiffness_ratio;
    m.lambda *= f.stiffness_ratio;
  }
  return m;
}

void write_vector(std::ostream& os, const std::string& name, const Eigen::VectorXd& u, int n) {
  os << "VECTORS " << name << " double\n";
  for (int i = 0; i < n; ++i) os << u(2 * i) << ' ' << u(2 * i + 1) << " 0\n";
}

void write_scalar(std::ostream& os, const std::string& name, const char* type, const std::vector<double>& v) {
  os << "SCALARS " << name << ' ' << type << " 1\nLOOKUP_TABLE default\n";
  for (double x : v) os << x << '\n';
}

}  // namespace

double stress_norm(const Mesh& mesh, int t, const Eigen::VectorXd& u, const FieldSet& f) {
  const auto& v = mesh.tris[t];
  const ElementBasis e = basis(mesh.nodes[v[0]], mesh.nodes[v[1]], mesh.nodes[v[2]]);
  Eigen::Matrix2d grad = Eigen::Matrix2d::Zero();  // grad(i, j) = d u_i / d x_j
  for (int a = 0; a < 3; ++a)
    for (int i = 0; i < 2; ++i) grad.row(i) += u(2 * v[a] + i) * e.G.col(a).transpose();
  const Eigen::Matrix2d eps = 0.5 * (grad + grad.transpose());
  const Moduli m = element_moduli(mesh, t, f);
  const double tr = eps.trace();
  const Eigen::Matrix2d sig = 2.0 * m.mu * eps + m.lambda * tr * Eigen::Matrix2d::Identity();
  const double szz = m.lambda * tr;
  return std::sqrt(sig.squaredNorm() + szz * szz);
}

void write_vtk(const Mesh& mesh, const FieldSet& f, const std::string& path) {
  const int n = mesh.num_nodes(), nt = mesh.num_tris();
  if (f.u.size() != f.loads.size() || (!f.gamma.empty() && f.gamma.size() != f.loads.size()))
    throw io_error("write_vtk: one displacement (and adjoint) field per load expected");
  std::ofstream os(path);
  if (!os) throw io_error("cannot open " + path + " for writing");
  os.precision(17);
  os << "# vtk DataFile Version 3.0\ncloak fields\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << n << " double\n";
  for (const auto& p : mesh.nodes) os << p.x() << ' ' << p.y() << " 0\n";
  os << "CELLS " << nt << ' ' << 4 * nt << '\n';
  for (const auto& t : mesh.tris) os << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  os << "CELL_TYPES " << nt << '\n';
  for (int t = 0; t < nt; ++t) os << "5\n";

  os << "POINT_DATA " << n << '\n';
  for (std::size_t l = 0; l < f.loads.size(); ++l) {
    write_vector(os, "u_" + f.loads[l], f.u[l], n);
    if (!f.gamma.empty()) write_vector(os, "gamma_" + f.loads[l], f.gamma[l], n);
  }
  std::vector<double> xi(n), eta(n), mu(n), kappa(n), nu(n);
  for (int i = 0; i < n; ++i) {
    xi[i] = nodal(f.xi, i);
    eta[i] = nodal(f.eta, i);
    const Moduli m = moduli(f.base, xi[i], eta[i]);
    mu[i] = m.mu;
    kappa[i] = m.kappa;
    nu[i] = poisson_ratio(m.mu, m.kappa);
  }
  write_scalar(os, "xi", "double", xi);
  write_scalar(os, "eta", "double", eta);
  write_scalar(os, "mu", "double", mu);
  write_scalar(os, "kappa", "double", kappa);
  write_scalar(os, "nu", "double", nu);

  os << "CELL_DATA " << nt << '\n';
  for (std::size_t l = 0; l < f.loads.size(); ++l) {
    std::vector<double> s(nt);
    for (int t = 0; t < nt; ++t) s[t] = stress_norm(mesh, t, f.u[l], f);
    write_scalar(os, "stress_" + f.loads[l], "double", s);
  }
  std::vector<double> region(nt), aux(nt);
  for (int t = 0; t < nt; ++t) {
    region[t] = static_cast<double>(mesh.region[t]);
    const Moduli m = element_moduli(mesh, t, f);
    aux[t] = is_auxetic(m.mu, m.kappa) ? 1.0 : 0.0;
  }
  write_scalar(os, "region", "int", region);
  write_scalar(os, "auxetic", "int", aux);
  if (!os) throw io_error("write failed for " + path);
}

VtkCounts read_vtk_counts(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw io_error("cannot open " + path);
  VtkCounts c;
  std::string line;
  while (std::getline(is, line)) {
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key == "POINTS") ss >> c.points;
    else if (key == "CELLS") ss >> c.cells;
  }
  return c;
}

std::string file_hash(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw io_error("cannot open " + path);
  const std::string data((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return fnv1a_hex(data);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw io_error("cannot open " + path + " for writing");
  os << text;
  if (!os) throw io_error("write failed for " + path);
}

}  // namespace cloak
