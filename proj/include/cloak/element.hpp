#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>

#include "cloak/material.hpp"
#include "cloak/mesh.hpp"

namespace cloak {

using Mat6 = Eigen::Matrix<double, 6, 6>;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat36 = Eigen::Matrix<double, 3, 6>;

/// Symmetric quadrature rule on the reference triangle; weights sum to one (multiply by area).
struct QuadRule {
  std::vector<Eigen::Vector3d> bary;
  std::vector<double> weight;
};

/// Degree-2 (3 points) or degree-5 (7 points) rule.
const QuadRule& triangle_rule(int degree);

/// Constant P1 data of one triangle. DOFs are node-interleaved: [u0x, u0y, u1x, u1y, u2x, u2y].
/// S maps the DOFs to the symmetric gradient in the order [11, 12, 21, 22].
struct ElementBasis {
  Eigen::Matrix<double, 2, 3> G;
  Eigen::Matrix<double, 1, 6> d;
  Eigen::Matrix<double, 4, 6> S;
  double area = 0.0;
};

ElementBasis basis(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c);

/// Vector shape-function matrix at a point with barycentric coordinates `bary`.
Eigen::Matrix<double, 2, 6> shape_matrix(const Eigen::Vector3d& bary);

struct WorkMatrices {
  Mat6 W1;
  Mat6 W2;
};

/// Work matrices at one quadrature point: the exponentials use the interpolated design values.
/// `scale` multiplies both base moduli (stiffened inhomogeneities).
WorkMatrices work_matrices(const ElementBasis& e, const Eigen::Vector3d& bary, const Eigen::Vector3d& qxi,
                           const Eigen::Vector3d& qeta, const BaseMaterial& base, double scale = 1.0);

struct ElementParams {
  BaseMaterial base;
  double m1 = 1.0, m2 = 1.0, alpha1 = 1.0, alpha2 = 1.0;
  double k = 0.0;  // per-load penalty
  double stiffness_ratio = 1e3;
  int quad_degree = 2;
};

struct ElementBlocks {
  Eigen::Matrix3d Kxixi, Ketaeta, Kbar_xixi, Kbar_etaeta;
  Mat36 Kxiu, Kxigamma, Ketau, Ketagamma;
  Mat6 Kugamma, Kuu;
  Vec6 Fu, Fgamma;
};

/// All element blocks for one load. Design values are used only on CLOAK triangles; Kuu and Fu
/// are nonzero only on EXTERIOR triangles. `utilde` holds the virtual displacement at the nodes.
/// The edge traction part of Fgamma is added separately (see edge_traction).
ElementBlocks element_blocks(const ElementBasis& e, Region region, const Eigen::Vector3d& qxi,
                             const Eigen::Vector3d& qeta, const Vec6& qgamma, const Vec6& qu, const Vec6& utilde,
                             const Eigen::Vector2d& body_force, const ElementParams& params);

/// Integral of N^T t over the edge (a, b) by 2-point Gauss: [fa_x, fa_y, fb_x, fb_y].
Eigen::Vector4d edge_traction(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                              const std::function<Eigen::Vector2d(const Eigen::Vector2d&)>& traction);

/// Standard homogeneous P1 stiffness with moduli scaled by `scale` (no design).
Mat6 elastic_stiffness(const ElementBasis& e, const BaseMaterial& base, double scale = 1.0);

}  // namespace cloak
