#include "cloak/element.hpp"

#include <cmath>

#include "cloak/error.hpp"

namespace cloak {

const QuadRule& triangle_rule(int degree) {
  static const QuadRule deg2 = [] {
    QuadRule r;
    const double a = 2.0 / 3.0, b = 1.0 / 6.0;
    r.bary = {{a, b, b}, {b, a, b}, {b, b, a}};
    r.weight = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    return r;
  }();
  static const QuadRule deg5 = [] {
    QuadRule r;
    const double s15 = std::sqrt(15.0);
    const double a1 = (6.0 - s15) / 21.0, b1 = (9.0 + 2.0 * s15) / 21.0;
    const double a2 = (6.0 + s15) / 21.0, b2 = (9.0 - 2.0 * s15) / 21.0;
    const double w1 = (155.0 - s15) / 1200.0, w2 = (155.0 + s15) / 1200.0;
    r.bary = {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, {b1, a1, a1}, {a1, b1, a1}, {a1, a1, b1},
              {b2, a2, a2},                       {a2, b2, a2}, {a2, a2, b2}};
    r.weight = {9.0 / 40.0, w1, w1, w1, w2, w2, w2};
    return r;
  }();
  if (degree == 2) return deg2;
  if (degree == 5) return deg5;
  throw config_error("quadrature degree must be 2 or 5");
}

ElementBasis basis(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
  ElementBasis e;
  const double det = (b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y());
  if (!(det > 0.0)) throw mesh_error("degenerate or inverted triangle");
  e.area = 0.5 * det;
  e.G << (b.y() - c.y()), (c.y() - a.y()), (a.y() - b.y()),
         (c.x() - b.x()), (a.x() - c.x()), (b.x() - a.x());
  e.G /= det;
  e.d.setZero();
  e.S.setZero();
  for (int n = 0; n < 3; ++n) {
    const double gx = e.G(0, n), gy = e.G(1, n);
    e.d(2 * n) = gx;
    e.d(2 * n + 1) = gy;
    e.S(0, 2 * n) = gx;
    e.S(1, 2 * n) = 0.5 * gy;
    e.S(1, 2 * n + 1) = 0.5 * gx;
    e.S(2, 2 * n) = 0.5 * gy;
    e.S(2, 2 * n + 1) = 0.5 * gx;
    e.S(3, 2 * n + 1) = gy;
  }
  return e;
}

Eigen::Matrix<double, 2, 6> shape_matrix(const Eigen::Vector3d& bary) {
  Eigen::Matrix<double, 2, 6> B = Eigen::Matrix<double, 2, 6>::Zero();
  for (int n = 0; n < 3; ++n) {
    B(0, 2 * n) = bary(n);
    B(1, 2 * n + 1) = bary(n);
  }
  return B;
}

namespace {

Mat6 deviatoric(const ElementBasis& e) { return -2.0 / 3.0 * e.d.transpose() * e.d + 2.0 * e.S.transpose() * e.S; }
Mat6 volumetric(const ElementBasis& e) { return e.d.transpose() * e.d; }

}  // namespace

WorkMatrices work_matrices(const ElementBasis& e, const Eigen::Vector3d& bary, const Eigen::Vector3d& qxi,
                           const Eigen::Vector3d& qeta, const BaseMaterial& base, double scale) {
  return {scale * base.mu0 * std::exp(-bary.dot(qxi)) * deviatoric(e),
          scale * base.kappa0 * std::exp(-bary.dot(qeta)) * volumetric(e)};
}

Mat6 elastic_stiffness(const ElementBasis& e, const BaseMaterial& base, double scale) {
  return e.area * scale * (base.mu0 * deviatoric(e) + base.kappa0 * volumetric(e));
}

ElementBlocks element_blocks(const ElementBasis& e, Region region, const Eigen::Vector3d& qxi,
                             const Eigen::Vector3d& qeta, const Vec6& qgamma, const Vec6& qu, const Vec6& utilde,
                             const Eigen::Vector2d& body_force, const ElementParams& p) {
  const QuadRule& rule = triangle_rule(p.quad_degree);
  const bool design = region == Region::Cloak;
  const double scale = region == Region::Inhomogeneity ? p.stiffness_ratio : 1.0;
  const Eigen::Vector3d xi = design ? qxi : Eigen::Vector3d::Zero();
  const Eigen::Vector3d eta = design ? qeta : Eigen::Vector3d::Zero();

  const Mat6 D1 = deviatoric(e), D2 = volumetric(e);
  const Vec6 D1g = D1 * qgamma, D2g = D2 * qgamma, D1u = D1 * qu, D2u = D2 * qu;
  const double s1 = qgamma.dot(D1u), s2 = qgamma.dot(D2u);

  ElementBlocks k;
  k.Kxixi.setZero();
  k.Ketaeta.setZero();
  k.Kbar_xixi.setZero();
  k.Kbar_etaeta.setZero();
  k.Kxiu.setZero();
  k.Kxigamma.setZero();
  k.Ketau.setZero();
  k.Ketagamma.setZero();
  k.Kuu.setZero();
  k.Fu.setZero();
  k.Fgamma.setZero();
  Eigen::Matrix3d mass = Eigen::Matrix3d::Zero();
  double e1_sum = 0.0, e2_sum = 0.0;
  Mat6 vmass = Mat6::Zero();
  Vec6 body = Vec6::Zero();

  for (std::size_t q = 0; q < rule.weight.size(); ++q) {
    const Eigen::Vector3d& b = rule.bary[q];
    const double w = rule.weight[q] * e.area;
    const double e1 = scale * p.base.mu0 * std::exp(-b.dot(xi));
    const double e2 = scale * p.base.kappa0 * std::exp(-b.dot(eta));
    e1_sum += w * e1;
    e2_sum += w * e2;
    if (design) {
      mass += w * b * b.transpose();
      k.Kxiu += w * e1 * b * D1g.transpose();
      k.Kxigamma += w * e1 * b * D1u.transpose();
      k.Ketau += w * e2 * b * D2g.transpose();
      k.Ketagamma += w * e2 * b * D2u.transpose();
      k.Kbar_xixi -= w * e1 * s1 * b * b.transpose();
      k.Kbar_etaeta -= w * e2 * s2 * b * b.transpose();
    }
    const auto B = shape_matrix(b);
    if (region == Region::Exterior) vmass += w * B.transpose() * B;
    body += w * B.transpose() * body_force;
  }
  if (design) {
    const Eigen::Matrix3d lap = e.area * e.G.transpose() * e.G;
    k.Kxixi = p.m1 * mass + p.alpha1 * lap;
    k.Ketaeta = p.m2 * mass + p.alpha2 * lap;
  }
  k.Kugamma = -(e1_sum * D1 + e2_sum * D2);
  if (region == Region::Exterior) {
    k.Kuu = p.k * vmass;
    k.Fu = k.Kuu * utilde;
  }
  k.Fgamma = -body;
  return k;
}

Eigen::Vector4d edge_traction(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                              const std::function<Eigen::Vector2d(const Eigen::Vector2d&)>& traction) {
  const double len = (b - a).norm();
  const double g = 0.5 / std::sqrt(3.0);
  Eigen::Vector4d f = Eigen::Vector4d::Zero();
  for (const double s : {0.5 - g, 0.5 + g}) {
    const Eigen::Vector2d t = traction(a + s * (b - a));
    f.head<2>() += 0.5 * len * (1.0 - s) * t;
    f.tail<2>() += 0.5 * len * s * t;
  }
  return f;
}

}  // namespace cloak
