#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "cloak/assembly.hpp"
#include "cloak/element.hpp"
#include "cloak/error.hpp"
#include "cloak/material.hpp"
#include "cloak/solver.hpp"
#include "test_util.hpp"

using namespace cloak;

namespace {

const BaseMaterial kBase{1.0, 2.0};

Eigen::Matrix2d grad_of(const ElementBasis& e, const Vec6& q) {
  Eigen::Matrix2d g = Eigen::Matrix2d::Zero();
  for (int a = 0; a < 3; ++a)
    for (int i = 0; i < 2; ++i) g.row(i) += q(2 * a + i) * e.G.col(a).transpose();
  return g;
}

// Textbook plane-strain stiffness with engineering strains [exx, eyy, 2exy].
Mat6 textbook_stiffness(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c, double mu,
                        double lambda) {
  const double area = 0.5 * ((b - a).x() * (c - a).y() - (c - a).x() * (b - a).y());
  const double y[3] = {a.y(), b.y(), c.y()}, x[3] = {a.x(), b.x(), c.x()};
  Eigen::Matrix<double, 3, 6> B = Eigen::Matrix<double, 3, 6>::Zero();
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    const double bi = (y[j] - y[k]) / (2 * area), ci = (x[k] - x[j]) / (2 * area);
    B(0, 2 * i) = bi;
    B(1, 2 * i + 1) = ci;
    B(2, 2 * i) = ci;
    B(2, 2 * i + 1) = bi;
  }
  Eigen::Matrix3d D;
  D << lambda + 2 * mu, lambda, 0, lambda, lambda + 2 * mu, 0, 0, 0, mu;
  return area * B.transpose() * D * B;
}

struct Tri {
  Eigen::Vector2d a{0.1, -0.2}, b{1.3, 0.4}, c{0.2, 0.9};
};

}  // namespace

// ---------------------------------------------------------------- material

TEST(Material, ModuliOfIdentityDesign) {
  const Moduli m = moduli(kBase, 0.0, 0.0);
  EXPECT_DOUBLE_EQ(m.mu, 1.0);
  EXPECT_DOUBLE_EQ(m.kappa, 2.0);
  EXPECT_NEAR(m.lambda, 4.0 / 3.0, 1e-15);
  const Moduli h = moduli(kBase, std::log(2.0), 0.0);
  EXPECT_NEAR(h.mu, 0.5, 1e-15);
  EXPECT_NEAR(h.lambda, 5.0 / 3.0, 1e-15);
}

TEST(Material, ShearModulusDerivative) {
  for (double xi : {-1.3, 0.0, 0.4, 2.2}) {
    const double d = 1e-5;
    const double fd = (moduli(kBase, xi + d, 0).mu - moduli(kBase, xi - d, 0).mu) / (2 * d);
    EXPECT_NEAR(fd, -moduli(kBase, xi, 0).mu, 1e-8);
  }
}

TEST(Material, PoissonRatio) {
  EXPECT_NEAR(poisson_ratio(1.0, 2.0), 2.0 / 7.0, 1e-15);
  EXPECT_NEAR(poisson_ratio(1.5, 1.0), 0.0, 1e-15);
  EXPECT_LT(poisson_ratio(3.0, 0.5), 0.0);
  EXPECT_TRUE(is_auxetic(3.0, 0.5));
  EXPECT_FALSE(is_auxetic(1.0, 2.0));
}

TEST(Material, StressExamples) {
  const Eigen::Matrix2d s = stress(kBase, 0, 0, Eigen::Matrix2d::Identity());
  EXPECT_TRUE(s.isApprox(14.0 / 3.0 * Eigen::Matrix2d::Identity(), 1e-14));
  Eigen::Matrix2d rot;
  rot << 0, 0.3, -0.3, 0;
  EXPECT_LE(stress(kBase, 0.7, -0.2, rot).norm(), 1e-15);
  Eigen::Matrix2d shear;
  shear << 0, 0.01, 0, 0;
  Eigen::Matrix2d expect;
  expect << 0, 0.01, 0.01, 0;
  EXPECT_TRUE(stress(kBase, 0, 0, shear).isApprox(expect, 1e-14));
}

TEST(Material, WorkDensities) {
  Eigen::Matrix2d sh;
  sh << 0, 0.2, 0.2, 0;
  auto [w1, w2] = work_densities(kBase, 0, 0, sh, sh);
  EXPECT_NEAR(w1, 4 * 0.04, 1e-15);
  EXPECT_NEAR(w2, 0.0, 1e-15);
  auto [z1, z2] = work_densities(kBase, 0.3, 0.1, sh, Eigen::Matrix2d::Zero());
  EXPECT_EQ(z1, 0.0);
  EXPECT_EQ(z2, 0.0);

  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    Eigen::Matrix2d gu = Eigen::Matrix2d::Random(), gg = Eigen::Matrix2d::Random();
    gu = 0.5 * (gu + gu.transpose()).eval();
    const double xi = std::uniform_real_distribution<double>(-1, 1)(rng);
    const double eta = std::uniform_real_distribution<double>(-1, 1)(rng);
    auto [a, b] = work_densities(kBase, xi, eta, gu, gg);
    const double contraction = (stress(kBase, xi, eta, gg).array() * gu.array()).sum();
    EXPECT_NEAR(a + b, contraction, 1e-12);
  }
}

// ---------------------------------------------------------------- element

TEST(Element, UnitTriangleBasis) {
  const ElementBasis e = basis({0, 0}, {1, 0}, {0, 1});
  Eigen::Matrix<double, 2, 3> G;
  G << -1, 1, 0, -1, 0, 1;
  EXPECT_TRUE(e.G.isApprox(G, 1e-15));
  EXPECT_DOUBLE_EQ(e.area, 0.5);
}

TEST(Element, DegenerateTriangleRejected) {
  EXPECT_THROW(basis({0, 0}, {1, 1}, {2, 2}), Error);
}

TEST(Element, GradientsAndRigidModes) {
  const Tri t;
  const ElementBasis e = basis(t.a, t.b, t.c);
  EXPECT_NEAR(e.G.row(0).sum(), 0.0, 1e-14);
  EXPECT_NEAR(e.G.row(1).sum(), 0.0, 1e-14);
  Vec6 trans, rot;
  const Eigen::Vector2d p[3] = {t.a, t.b, t.c};
  for (int a = 0; a < 3; ++a) {
    trans.segment<2>(2 * a) << 0.3, -0.7;
    rot.segment<2>(2 * a) << -p[a].y(), p[a].x();
  }
  EXPECT_NEAR(e.d * trans, 0.0, 1e-14);
  EXPECT_LE((e.S * rot).norm(), 1e-14);
}

TEST(Element, AffineFieldIsReproduced) {
  const Tri t;
  const ElementBasis e = basis(t.a, t.b, t.c);
  Eigen::Matrix2d A;
  A << 0.3, -1.1, 0.25, 0.7;
  const Eigen::Vector2d c(0.4, -0.9);
  Vec6 q;
  const Eigen::Vector2d p[3] = {t.a, t.b, t.c};
  for (int a = 0; a < 3; ++a) q.segment<2>(2 * a) = A * p[a] + c;
  EXPECT_TRUE(grad_of(e, q).isApprox(A, 1e-14));
  EXPECT_NEAR(e.d * q, A.trace(), 1e-14);
  const Eigen::Matrix2d sym = 0.5 * (A + A.transpose());
  const Eigen::Vector4d vec(sym(0, 0), sym(0, 1), sym(1, 0), sym(1, 1));
  EXPECT_TRUE((e.S * q).isApprox(vec, 1e-14));
}

TEST(Element, WorkMatricesMatchPointwiseDensities) {
  const Tri t;
  const ElementBasis e = basis(t.a, t.b, t.c);
  const Eigen::Vector3d qxi(0.2, -0.4, 0.1), qeta(0.5, 0.0, -0.3);
  const Vec6 qu = Vec6::Random(), qg = Vec6::Random();
  for (const auto& b : triangle_rule(2).bary) {
    const WorkMatrices W = work_matrices(e, b, qxi, qeta, kBase);
    auto [w1, w2] = work_densities(kBase, b.dot(qxi), b.dot(qeta), grad_of(e, qu), grad_of(e, qg));
    EXPECT_NEAR(qg.dot(W.W1 * qu), w1, 1e-12);
    EXPECT_NEAR(qg.dot(W.W2 * qu), w2, 1e-12);
    EXPECT_LE((W.W1 - W.W1.transpose()).norm(), 1e-14);
    EXPECT_GE(Eigen::SelfAdjointEigenSolver<Mat6>(W.W1).eigenvalues().minCoeff(), -1e-12);
    EXPECT_GE(Eigen::SelfAdjointEigenSolver<Mat6>(W.W2).eigenvalues().minCoeff(), -1e-12);
    const WorkMatrices S = work_matrices(e, b, qxi + Eigen::Vector3d::Constant(0.8), qeta, kBase);
    EXPECT_TRUE(S.W1.isApprox(std::exp(-0.8) * W.W1, 1e-13));
  }
}

TEST(Element, DivergenceFreeFieldHasNoVolumetricWork) {
  const Tri t;
  const ElementBasis e = basis(t.a, t.b, t.c);
  Vec6 q;
  const Eigen::Vector2d p[3] = {t.a, t.b, t.c};
  for (int a = 0; a < 3; ++a) q.segment<2>(2 * a) << p[a].y(), p[a].x();  // pure shear, zero divergence
  const WorkMatrices W = work_matrices(e, Eigen::Vector3d::Constant(1.0 / 3), Eigen::Vector3d::Zero(),
                                       Eigen::Vector3d::Zero(), kBase);
  EXPECT_LE((W.W2 * q).norm(), 1e-14);
}

TEST(Element, ZeroDesignMatchesTextbookStiffness) {
  const Tri t;
  const ElementBasis e = basis(t.a, t.b, t.c);
  const Mat6 ref = textbook_stiffness(t.a, t.b, t.c, 1.0, 4.0 / 3.0);
  EXPECT_LE((elastic_stiffness(e, kBase) - ref).cwiseAbs().maxCoeff(), 1e-12 * ref.cwiseAbs().maxCoeff());
  ElementParams p;
  p.base = kBase;
  const Vec6 z = Vec6::Zero();
  const ElementBlocks k =
      element_blocks(e, Region::Cloak, Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero(), z, z, z, {0, 0}, p);
  EXPECT_LE((-k.Kugamma - ref).cwiseAbs().maxCoeff(), 1e-12 * ref.cwiseAbs().maxCoeff());
}

TEST(Element, ExteriorBlocks) {
  const Tri t;
  const ElementBasis e = basis(t.a, t.b, t.c);
  ElementParams p;
  p.k = 7.0;
  const ElementBlocks k = element_blocks(e, Region::Exterior, Eigen::Vector3d(0.3, 0.1, 0.2), Eigen::Vector3d(1, 1, 1),
                                         Vec6::Random(), Vec6::Random(), Vec6::Random(), {0, 0}, p);
  EXPECT_EQ(k.Kxiu.norm(), 0.0);
  EXPECT_EQ(k.Ketau.norm(), 0.0);
  EXPECT_GT(Eigen::SelfAdjointEigenSolver<Mat6>(k.Kuu).eigenvalues().minCoeff(), 0.0);
  // Consistent P1 vector mass times k.
  Mat6 mass = Mat6::Zero();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) mass(2 * i, 2 * j) = mass(2 * i + 1, 2 * j + 1) = e.area * (i == j ? 2 : 1) / 12.0;
  EXPECT_LE((k.Kuu - 7.0 * mass).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LE((k.Kugamma - k.Kugamma.transpose()).norm(), 1e-14);
}

TEST(Element, CloakBlocksLinearInAdjoint) {
  const Tri t;
  const ElementBasis e = basis(t.a, t.b, t.c);
  ElementParams p;
  const ElementBlocks k = element_blocks(e, Region::Cloak, Eigen::Vector3d(0.3, 0.1, 0.2), Eigen::Vector3d(1, 0, 1),
                                         Vec6::Zero(), Vec6::Random(), Vec6::Random(), {0, 0}, p);
  EXPECT_EQ(k.Kxiu.norm(), 0.0);
  EXPECT_EQ(k.Kbar_xixi.norm(), 0.0);
  EXPECT_EQ(k.Kuu.norm(), 0.0);
  EXPECT_GT(Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(k.Kxixi).eigenvalues().minCoeff(), 0.0);
}

TEST(Element, AdjointIdentity) {
  std::mt19937_64 rng(11);
  ElementParams p;
  for (int i = 0; i < 20; ++i) {
    const Eigen::Vector2d a = test::random_vector(2, rng), b = a + Eigen::Vector2d(1.0, 0.1) + 0.3 * test::random_vector(2, rng),
                          c = a + Eigen::Vector2d(0.2, 1.0) + 0.3 * test::random_vector(2, rng);
    const ElementBasis e = basis(a, b, c);
    const Eigen::Vector3d qxi = test::random_vector(3, rng), qeta = test::random_vector(3, rng);
    const Vec6 qu = test::random_vector(6, rng), qg = test::random_vector(6, rng);
    const ElementBlocks k = element_blocks(e, Region::Cloak, qxi, qeta, qg, qu, Vec6::Zero(), {0, 0}, p);
    const Eigen::Vector3d l1 = k.Kxiu * qu, r1 = k.Kxigamma * qg;
    const Eigen::Vector3d l2 = k.Ketau * qu, r2 = k.Ketagamma * qg;
    EXPECT_LE((l1 - r1).norm(), 1e-12 * std::max(1.0, l1.norm()));
    EXPECT_LE((l2 - r2).norm(), 1e-12 * std::max(1.0, l2.norm()));
  }
}

TEST(Element, EdgeTraction) {
  const Eigen::Vector2d a(0.3, 0.1), b(1.5, 0.9);
  const double L = (b - a).norm();
  const Eigen::Vector4d f = edge_traction(a, b, [](const Eigen::Vector2d&) { return Eigen::Vector2d(2.0, -1.0); });
  EXPECT_NEAR(f(0), L, 1e-14);
  EXPECT_NEAR(f(1), -L / 2, 1e-14);
  EXPECT_NEAR(f(2), L, 1e-14);
  EXPECT_NEAR(f(3), -L / 2, 1e-14);
  EXPECT_EQ(edge_traction(a, b, [](const Eigen::Vector2d&) { return Eigen::Vector2d::Zero(); }).norm(), 0.0);
  // t(s) = 1 + 3 s along the edge: node a gets L (1/2 + 1/2), node b gets L (1/2 + 1).
  const Eigen::Vector4d g = edge_traction(a, b, [&](const Eigen::Vector2d& x) {
    const double s = (x - a).norm() / L;
    return Eigen::Vector2d(1.0 + 3.0 * s, 0.0);
  });
  EXPECT_NEAR(g(0), L * 1.0, 1e-14);
  EXPECT_NEAR(g(2), L * 1.5, 1e-14);
}

TEST(Element, QuadratureRules) {
  for (int deg : {2, 5}) {
    const QuadRule& r = triangle_rule(deg);
    double s = 0, m = 0;
    for (std::size_t i = 0; i < r.weight.size(); ++i) {
      s += r.weight[i];
      m += r.weight[i] * r.bary[i](0) * r.bary[i](1);
    }
    EXPECT_NEAR(s, 1.0, 1e-14);
    EXPECT_NEAR(m, 1.0 / 12.0, 1e-14);  // int l0 l1 / area
  }
}

// ---------------------------------------------------------------- assembly

TEST(Assembly, DofLayout) {
  const Geometry g = test::small_cloak_geometry();
  const Mesh& m = g.physical;
  const std::vector<LoadCase> loads = {make_load(LoadId::XT, 0.01), make_load(LoadId::XD, 0.01)};
  const DofMap d = build_dofmap(m, loads);
  int expected = 0;
  std::vector<char> cl(m.num_nodes(), 0);
  for (int t = 0; t < m.num_tris(); ++t)
    if (m.region[t] == Region::Cloak)
      for (int v : m.tris[t]) cl[v] = 1;
  for (char c : cl) expected += c;
  EXPECT_EQ(d.num_design(), expected);
  EXPECT_EQ(d.size(), 2 * expected + 8 * m.num_nodes());
  EXPECT_EQ(d.u(0, 0, 0), 2 * expected);
  EXPECT_EQ(d.gamma(1, m.num_nodes() - 1, 1), d.size() - 1);
}

TEST(Assembly, NoCloakMeansNoDesignDofs) {
  GeometrySpec s;
  s.h = 1.0;
  const Geometry g = build_geometry(s);
  EXPECT_EQ(build_dofmap(g.physical, {make_load(LoadId::XT, 0.01)}).num_design(), 0);
}

TEST(Assembly, PureTractionPinsOnly) {
  const Geometry g = test::small_cloak_geometry();
  const DofMap d = build_dofmap(g.physical, {make_load(LoadId::ST, 0.01)});
  int n = 0;
  for (char c : d.constrained) n += c;
  EXPECT_EQ(n, 6);  // three u and three gamma components
  const RigidPins p = rigid_pins(g.physical);
  EXPECT_TRUE(d.constrained[d.u(0, p.corner, 0)] && d.constrained[d.u(0, p.corner, 1)]);
  EXPECT_TRUE(d.constrained[d.u(0, p.second, 0)] && !d.constrained[d.u(0, p.second, 1)]);
  EXPECT_TRUE(d.constrained[d.gamma(0, p.second, 0)]);
}

TEST(Assembly, IndependentConstraintSetsPerLoad) {
  const Geometry g = test::small_cloak_geometry();
  const Mesh& m = g.physical;
  const std::vector<LoadCase> loads = {make_load(LoadId::XD, 0.01), make_load(LoadId::YD, 0.01)};
  const DofMap d = build_dofmap(m, loads);
  const auto box = bounding_box(m);
  for (int i = 0; i < m.num_nodes(); ++i) {
    const auto& x = m.nodes[i];
    const bool lr = std::abs(x.x() - box[0]) < 1e-12 || std::abs(x.x() - box[1]) < 1e-12;
    const bool tb = std::abs(x.y() - box[2]) < 1e-12 || std::abs(x.y() - box[3]) < 1e-12;
    EXPECT_EQ(static_cast<bool>(d.constrained[d.u(0, i, 0)]), lr) << i;
    EXPECT_EQ(static_cast<bool>(d.constrained[d.u(1, i, 1)]), tb) << i;
    EXPECT_EQ(d.constrained[d.u(0, i, 0)], d.constrained[d.gamma(0, i, 0)]);
    if (lr) {
      EXPECT_NEAR(d.prescribed[d.u(0, i, 0)], 0.01 * x.x(), 1e-15);
      EXPECT_EQ(d.prescribed[d.gamma(0, i, 0)], 0.0);
    }
  }
}

TEST(Assembly, ConstraintOffDirichletBoundaryRejected) {
  const Geometry g = test::small_cloak_geometry();
  const std::vector<LoadCase> loads = {make_load(LoadId::XD, 0.01)};
  DofMap d = build_dofmap(g.physical, loads);
  const auto box = bounding_box(g.physical);
  int interior = -1, left = -1;
  for (int i = 0; i < g.physical.num_nodes(); ++i) {
    const auto& x = g.physical.nodes[i];
    if (x.x() > box[0] + 0.1 && x.x() < box[1] - 0.1 && x.y() > box[2] + 0.1 && x.y() < box[3] - 0.1) interior = i;
    if (x.x() == box[0] && x.y() > box[2] && x.y() < box[3]) left = i;
  }
  ASSERT_GE(interior, 0);
  EXPECT_THROW(constrain_u(d, g.physical, loads, 0, interior, 1, 0.0), Error);
  EXPECT_NO_THROW(constrain_u(d, g.physical, loads, 0, left, 1, 0.002));
  EXPECT_EQ(d.prescribed[d.u(0, left, 1)], 0.002);
}

TEST(Assembly, NoCloakStateSolvesStateAndAdjointRows) {
  const Geometry g = test::small_cloak_geometry(0.6);
  const std::vector<LoadCase> loads = {make_load(LoadId::XT, 0.01), make_load(LoadId::SD, 0.01)};
  const DofMap d = build_dofmap(g.physical, loads);
  Assembler as(g.physical, d, loads, ElementParams{});
  std::vector<Eigen::VectorXd> u;
  for (const auto& l : loads) u.push_back(solve_nocloak(g, l, BaseMaterial{}, 1e3));
  as.set_targets(u, {0.0, 0.0});
  const Eigen::VectorXd R = as.residual(initial_state(d, u));
  double scale = 0.0;
  for (const auto& l : loads) scale = std::max(scale, traction_vector(g.physical, l).cwiseAbs().maxCoeff());
  for (int gdof = 2 * d.num_design(); gdof < d.size(); ++gdof) {
    if (d.constrained[gdof]) continue;
    EXPECT_LE(std::abs(R(gdof)), 1e-10 * std::max(scale, 1e-3)) << d.describe(gdof);
  }
}

TEST(Assembly, DesignRowsAreRegularizationWhenAdjointVanishes) {
  const Geometry g = test::small_cloak_geometry();
  const std::vector<LoadCase> loads = {make_load(LoadId::XT, 0.01)};
  const DofMap d = build_dofmap(g.physical, loads);
  Assembler as(g.physical, d, loads, ElementParams{});
  std::mt19937_64 rng(5);
  Eigen::VectorXd q = test::random_vector(d.size(), rng, 0.5);
  q.tail(2 * g.physical.num_nodes()).setZero();  // gamma = 0
  const Eigen::VectorXd R = as.residual(q);

  // Independent regularization assembly: consistent mass plus Laplacian on cloak triangles.
  const int nd = d.num_design();
  Eigen::MatrixXd Kr = Eigen::MatrixXd::Zero(nd, nd);
  for (int t = 0; t < g.physical.num_tris(); ++t) {
    if (g.physical.region[t] != Region::Cloak) continue;
    const auto& v = g.physical.tris[t];
    const ElementBasis e = basis(g.physical.nodes[v[0]], g.physical.nodes[v[1]], g.physical.nodes[v[2]]);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        Kr(d.xi(v[a]), d.xi(v[b])) += e.area * (a == b ? 2 : 1) / 12.0 + e.area * e.G.col(a).dot(e.G.col(b));
  }
  EXPECT_LE((R.head(nd) - Kr * q.head(nd)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((R.segment(nd, nd) - Kr * q.segment(nd, nd)).cwiseAbs().maxCoeff(), 1e-12);

  // The (gamma, gamma) block vanishes and the design-design coupling carries no adjoint term.
  const Eigen::MatrixXd J = Eigen::MatrixXd(as.jacobian(q));
  const int g0 = d.gamma(0, 0, 0);
  EXPECT_EQ(J.block(g0, g0, d.size() - g0, d.size() - g0).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_LE((J.topLeftCorner(nd, nd) - Kr).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Assembly, LoadPenaltyScaling) {
  const Geometry g = test::small_cloak_geometry();
  const double c = 3.7;
  std::vector<LoadCase> l1 = {make_load(LoadId::XT, 0.01)}, l2 = {make_load(LoadId::XT, 0.01 * c)};
  const DofMap d = build_dofmap(g.physical, l1);
  Assembler a1(g.physical, d, l1, ElementParams{}), a2(g.physical, d, l2, ElementParams{});
  std::mt19937_64 rng(17);
  const Eigen::VectorXd ut = test::random_vector(2 * g.physical.num_nodes(), rng, 0.05);
  a1.set_targets({ut}, {40.0});
  a2.set_targets({c * ut}, {40.0 / (c * c)});
  Eigen::VectorXd q = test::random_vector(d.size(), rng, 0.3);
  const int nd = d.num_design(), n2 = 2 * g.physical.num_nodes();
  Eigen::VectorXd qs = q;
  qs.segment(2 * nd, n2) *= c;
  qs.segment(2 * nd + n2, n2) /= c;
  const Eigen::VectorXd r1 = a1.residual(q), r2 = a2.residual(qs);
  const double tol = 1e-12 * r1.cwiseAbs().maxCoeff() * c;
  EXPECT_LE((r2.head(2 * nd) - r1.head(2 * nd)).cwiseAbs().maxCoeff(), tol);
  EXPECT_LE((r2.segment(2 * nd, n2) - r1.segment(2 * nd, n2) / c).cwiseAbs().maxCoeff(), tol);
  EXPECT_LE((r2.segment(2 * nd + n2, n2) - c * r1.segment(2 * nd + n2, n2)).cwiseAbs().maxCoeff(), tol);
}

TEST(Assembly, JacobianMatchesFiniteDifferences) {
  const Geometry g = test::small_cloak_geometry();
  const std::vector<LoadCase> loads = {make_load(LoadId::XT, 0.01), make_load(LoadId::YD, 0.01)};
  std::vector<LoadCase> weighted = loads;
  weighted[0].weight = 0.4;
  weighted[1].weight = 0.6;
  const DofMap d = build_dofmap(g.physical, weighted);
  Assembler as(g.physical, d, weighted, ElementParams{});
  std::mt19937_64 rng(23);
  const int n2 = 2 * g.physical.num_nodes();
  as.set_targets({test::random_vector(n2, rng, 0.1), test::random_vector(n2, rng, 0.1)}, {30.0, 12.0});
  const Eigen::VectorXd q = test::random_vector(d.size(), rng, 0.4);
  const Eigen::MatrixXd J = Eigen::MatrixXd(as.jacobian(q));
  const double h = 1e-4;
  int bad = 0;
  for (int j = 0; j < d.size(); ++j) {
    auto at = [&](double s) {
      Eigen::VectorXd p = q;
      p(j) += s;
      return as.residual(p);
    };
    const Eigen::VectorXd fd = (8 * (at(h) - at(-h)) - (at(2 * h) - at(-2 * h))) / (12 * h);
    for (int i = 0; i < d.size(); ++i) {
      const bool b = std::abs(J(i, j) - fd(i)) > 1e-6 * std::abs(J(i, j)) + 1e-10;
      if (b && bad < 15) ADD_FAILURE() << d.describe(i) << " / " << d.describe(j) << ": " << J(i, j) << " vs " << fd(i);
      bad += b;
    }
  }
  EXPECT_EQ(bad, 0);
  EXPECT_LE((J - J.transpose()).cwiseAbs().maxCoeff(), 1e-12 * J.cwiseAbs().maxCoeff());
}

TEST(Assembly, ReducedSystemStaysSymmetric) {
  const Geometry g = test::small_cloak_geometry();
  const std::vector<LoadCase> loads = {make_load(LoadId::SD, 0.01)};
  const DofMap d = build_dofmap(g.physical, loads);
  Assembler as(g.physical, d, loads, ElementParams{});
  std::mt19937_64 rng(29);
  as.set_targets({test::random_vector(2 * g.physical.num_nodes(), rng, 0.1)}, {5.0});
  const System s = as.reduced(initial_state(d, {}));
  const Eigen::MatrixXd J = Eigen::MatrixXd(s.jacobian);
  EXPECT_EQ(J.rows(), d.num_free());
  EXPECT_LE((J - J.transpose()).cwiseAbs().maxCoeff(), 1e-12 * J.cwiseAbs().maxCoeff());
}

TEST(Assembly, AffineDirichletPatch) {
  // Full-boundary affine data on a homogeneous body: the interior solve reproduces it exactly.
  GeometrySpec s;
  s.h = 0.7;
  const Geometry g = build_geometry(s);
  LoadCase l = make_load(LoadId::SD, 0.02);
  SparseMatrix K = elasticity_matrix(g.physical, {}, {}, BaseMaterial{}, 1.0, 2, true);
  const Eigen::VectorXd u = solve_elastic(g.physical, l, K);
  double err = 0.0;
  for (int i = 0; i < g.physical.num_nodes(); ++i)
    err = std::max(err, (u.segment<2>(2 * i) - l.displacement(g.physical.nodes[i])).cwiseAbs().maxCoeff());
  EXPECT_LE(err, 1e-12);
}

TEST(Assembly, ZeroDirichletGivesZero) {
  GeometrySpec s;
  s.h = 0.8;
  const Geometry g = build_geometry(s);
  const LoadCase l = make_load(LoadId::XD, 0.0);
  const Eigen::VectorXd u = solve_virtual(g, l, BaseMaterial{});
  EXPECT_EQ(u.cwiseAbs().maxCoeff(), 0.0);
}
