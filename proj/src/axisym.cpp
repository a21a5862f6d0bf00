#include "cloak/axisym.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/numeric/odeint.hpp>

#include "cloak/error.hpp"

namespace cloak::axisym {

namespace {

// a = 2 kappa + 2 mu / 3 so that sigma_rr = a D1 - 2 mu D2 / r^2 for u = D1 r + D2 / r.
double a_coef(double kappa, double mu) { return 2.0 * kappa + 2.0 * mu / 3.0; }

// C2 = alpha C1 - beta.
std::pair<double, double> outer_affine(const CylinderSpec& s) {
  const double ro2 = s.r_o * s.r_o;
  return {a_coef(s.kappa0, s.mu0) / (2.0 * s.mu0) * ro2, s.sigma_inf * ro2 / (2.0 * s.mu0)};
}

}  // namespace

void CylinderSpec::validate() const {
  if (!(0.0 < r_i && r_i < r_c && r_c < r_o)) throw config_error("axisym: radii must satisfy 0 < r_i < r_c < r_o");
  if (!(mu0 > 0.0 && kappa0 > 0.0)) throw config_error("axisym: base moduli must be positive");
  if (!std::isfinite(sigma_inf)) throw config_error("axisym: far-field traction must be finite");
}

std::string to_string(ProfileKind k) {
  switch (k) {
    case ProfileKind::UniformP: return "uniform-p";
    case ProfileKind::UniformKappaMu: return "uniform-kappa-mu";
    case ProfileKind::LinearP: return "linear-p";
  }
  return "?";
}

ProfileKind parse_profile_kind(const std::string& s) {
  if (s == "uniform-p") return ProfileKind::UniformP;
  if (s == "uniform-kappa-mu") return ProfileKind::UniformKappaMu;
  if (s == "linear-p") return ProfileKind::LinearP;
  throw config_error("unknown profile kind '" + s + "' (uniform-p, uniform-kappa-mu, linear-p)");
}

double RadialProfile::mu(const CylinderSpec& s, double r) const {
  switch (kind) {
    case ProfileKind::UniformP: return s.mu0 * p1;
    case ProfileKind::UniformKappaMu: return p2;
    case ProfileKind::LinearP: return s.mu0 * ((s.r_c - r) * p1 + (r - s.r_i) * p2) / (s.r_c - s.r_i);
  }
  return 0.0;
}

double RadialProfile::kappa(const CylinderSpec& s, double r) const {
  switch (kind) {
    case ProfileKind::UniformP: return s.kappa0 * p1;
    case ProfileKind::UniformKappaMu: return p1;
    case ProfileKind::LinearP: return s.kappa0 * ((s.r_c - r) * p1 + (r - s.r_i) * p2) / (s.r_c - s.r_i);
  }
  return 0.0;
}

double RadialProfile::dmu(const CylinderSpec& s) const {
  return kind == ProfileKind::LinearP ? s.mu0 * (p2 - p1) / (s.r_c - s.r_i) : 0.0;
}

double RadialProfile::dkappa(const CylinderSpec& s) const {
  return kind == ProfileKind::LinearP ? s.kappa0 * (p2 - p1) / (s.r_c - s.r_i) : 0.0;
}

VirtualSolution virtual_solution(const CylinderSpec& s) {
  s.validate();
  VirtualSolution v;
  v.C1 = 3.0 * s.sigma_inf / (2.0 * (3.0 * s.kappa0 + s.mu0));
  v.sigma = s.sigma_inf;
  return v;
}

double outer_constants(const CylinderSpec& s, double C1) {
  const auto [alpha, beta] = outer_affine(s);
  return alpha * C1 - beta;
}

double objective_from_C1(const CylinderSpec& s, double C1) {
  const double rc2 = s.r_c * s.r_c, ro2 = s.r_o * s.r_o;
  const double b = 3.0 * s.kappa0 + s.mu0;
  const double d = s.sigma_inf - 2.0 / 3.0 * b * C1;
  return M_PI * (ro2 - rc2) * (3.0 * s.mu0 * rc2 + b * ro2) / (2.0 * s.mu0 * b * rc2) * d * d;
}

double radial_stress(double kappa, double mu, double r, double u, double du) {
  return (kappa + 4.0 * mu / 3.0) * du + (kappa - 2.0 * mu / 3.0) * u / r;
}

double RadialSolution::u(double x) const {
  if (x >= spec.r_c) return C1 * x + C2 / x;
  if (closed_form) return D1 * x + D2 / x;
  // Cubic Hermite on the sampled inner field.
  auto it = std::upper_bound(r.begin(), r.end(), x);
  std::size_t i = it == r.begin() ? 0 : static_cast<std::size_t>(it - r.begin()) - 1;
  if (i + 1 >= r.size()) i = r.size() - 2;
  const double h = r[i + 1] - r[i], t = (x - r[i]) / h;
  const double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
  const double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
  return h00 * u_s[i] + h10 * h * du_s[i] + h01 * u_s[i + 1] + h11 * h * du_s[i + 1];
}

double RadialSolution::du(double x) const {
  if (x >= spec.r_c) return C1 - C2 / (x * x);
  if (closed_form) return D1 - D2 / (x * x);
  auto it = std::upper_bound(r.begin(), r.end(), x);
  std::size_t i = it == r.begin() ? 0 : static_cast<std::size_t>(it - r.begin()) - 1;
  if (i + 1 >= r.size()) i = r.size() - 2;
  const double h = r[i + 1] - r[i], t = (x - r[i]) / h;
  const double d00 = 6 * t * t - 6 * t, d10 = 3 * t * t - 4 * t + 1, d01 = -d00, d11 = 3 * t * t - 2 * t;
  return (d00 * u_s[i] + d01 * u_s[i + 1]) / h + d10 * du_s[i] + d11 * du_s[i + 1];
}

double RadialSolution::srr(double x) const {
  if (x >= spec.r_c) return radial_stress(spec.kappa0, spec.mu0, x, u(x), du(x));
  return radial_stress(profile.kappa(spec, x), profile.mu(spec, x), x, u(x), du(x));
}

namespace {

void check_profile(const CylinderSpec& s, const RadialProfile& p) {
  for (double r : {s.r_i, s.r_c}) {
    const double mu = p.mu(s, r), kappa = p.kappa(s, r);
    if (!(mu > 0.0 && kappa > 0.0)) throw config_error("axisym: profile moduli must be positive on [r_i, r_c]");
    if (!(3.0 * kappa + 4.0 * mu > 1e-12)) throw config_error("axisym: singular coefficient 3 kappa + 4 mu");
  }
}

}  // namespace

RadialSolution solve(const CylinderSpec& s, const RadialProfile& p) {
  s.validate();
  if (p.kind == ProfileKind::LinearP) return solve_radial_ode(s, p);
  check_profile(s, p);
  const double mu = p.mu(s, s.r_i), kappa = p.kappa(s, s.r_i);
  const double a = a_coef(kappa, mu), a0 = a_coef(s.kappa0, s.mu0);
  const auto [alpha, beta] = outer_affine(s);
  const double ri2 = s.r_i * s.r_i, rc2 = s.r_c * s.r_c;
  // Unknowns (D1, D2, C1): traction-free inner rim, continuity of u and sigma_rr at r_c.
  Eigen::Matrix3d A;
  Eigen::Vector3d b;
  A << a, -2.0 * mu / ri2, 0.0,
       s.r_c, 1.0 / s.r_c, -(s.r_c + alpha / s.r_c),
       a, -2.0 * mu / rc2, -(a0 - 2.0 * s.mu0 * alpha / rc2);
  b << 0.0, -beta / s.r_c, 2.0 * s.mu0 * beta / rc2;
  const Eigen::Vector3d x = A.fullPivLu().solve(b);
  RadialSolution sol;
  sol.spec = s;
  sol.profile = p;
  sol.closed_form = true;
  sol.D1 = x(0);
  sol.D2 = x(1);
  sol.C1 = x(2);
  sol.C2 = alpha * sol.C1 - beta;
  return sol;
}

RadialSolution solve_radial_ode(const CylinderSpec& s, const RadialProfile& p, int samples) {
  s.validate();
  check_profile(s, p);
  if (samples < 2) throw config_error("axisym: need at least two ODE samples");
  using State = std::array<double, 2>;
  const double dmu = p.dmu(s), dkappa = p.dkappa(s);
  auto rhs = [&](const State& y, State& dy, double r) {
    const double mu = p.mu(s, r), kappa = p.kappa(s, r);
    const double c = 3.0 * kappa + 4.0 * mu;
    if (!(c > 1e-12)) throw solver_error("axisym: singular coefficient 3 kappa + 4 mu");
    dy[0] = y[1];
    dy[1] = -((3.0 * dkappa + 4.0 * dmu) / c + 1.0 / r) * y[1] - ((3.0 * dkappa - 2.0 * dmu) / c - 1.0 / r) / r * y[0];
  };

  // Unit shot: u(r_i) = 1 with the traction-free condition fixing u'(r_i).
  const double mui = p.mu(s, s.r_i), ki = p.kappa(s, s.r_i);
  State y{1.0, -(ki - 2.0 * mui / 3.0) / (ki + 4.0 * mui / 3.0) / s.r_i};

  RadialSolution sol;
  sol.spec = s;
  sol.profile = p;
  std::vector<double> times(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) times[i] = s.r_i + (s.r_c - s.r_i) * i / (samples - 1);
  times.back() = s.r_c;
  namespace odeint = boost::numeric::odeint;
  auto stepper = odeint::make_dense_output(1e-13, 1e-10, odeint::runge_kutta_dopri5<State>());
  odeint::integrate_times(stepper, rhs, y, times.begin(), times.end(), (s.r_c - s.r_i) / 100.0,
                          [&](const State& st, double r) {
                            sol.r.push_back(r);
                            sol.u_s.push_back(st[0]);
                            sol.du_s.push_back(st[1]);
                          });

  const double U = sol.u_s.back(), dU = sol.du_s.back();
  const double S = radial_stress(p.kappa(s, s.r_c), p.mu(s, s.r_c), s.r_c, U, dU);
  const auto [alpha, beta] = outer_affine(s);
  const double a0 = a_coef(s.kappa0, s.mu0), rc2 = s.r_c * s.r_c;
  // Unknowns (shot scale t, C1): continuity of u and sigma_rr at r_c.
  Eigen::Matrix2d A;
  Eigen::Vector2d b;
  A << U, -(s.r_c + alpha / s.r_c),
       S, -(a0 - 2.0 * s.mu0 * alpha / rc2);
  b << -beta / s.r_c, 2.0 * s.mu0 * beta / rc2;
  const Eigen::Vector2d x = A.fullPivLu().solve(b);
  for (std::size_t i = 0; i < sol.r.size(); ++i) {
    sol.u_s[i] *= x(0);
    sol.du_s[i] *= x(0);
  }
  sol.C1 = x(1);
  sol.C2 = alpha * sol.C1 - beta;
  return sol;
}

double balance_residual(const CylinderSpec& s, const RadialProfile& p, double r, double u, double du, double ddu) {
  const double c = 3.0 * p.kappa(s, r) + 4.0 * p.mu(s, r);
  const double dk = p.dkappa(s), dm = p.dmu(s);
  return ddu + ((3.0 * dk + 4.0 * dm) / c + 1.0 / r) * du + ((3.0 * dk - 2.0 * dm) / c - 1.0 / r) / r * u;
}

double objective(const RadialSolution& sol) {
  const double ct = virtual_solution(sol.spec).C1;
  const double e1 = sol.C1 - ct, e2 = sol.C2;
  auto f = [&](double r) {
    const double d = e1 * r + e2 / r;
    return d * d * r;
  };
  double err = 0.0;
  const double v =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, sol.spec.r_c, sol.spec.r_o, 15, 1e-12, &err);
  return M_PI * v;
}

double perfect_uniform_P(const CylinderSpec& s) {
  s.validate();
  const double ri2 = s.r_i * s.r_i, rc2 = s.r_c * s.r_c;
  return (3.0 * ri2 * s.kappa0 + (3.0 * rc2 + ri2) * s.mu0) / (3.0 * (rc2 - ri2) * s.mu0);
}

std::pair<double, double> mu_limits(const CylinderSpec& s) {
  s.validate();
  const double ri2 = s.r_i * s.r_i, rc2 = s.r_c * s.r_c, b = 3.0 * s.kappa0 + s.mu0;
  return {ri2 * b / (3.0 * (rc2 - ri2)), b * (3.0 * rc2 + ri2) / (3.0 * (rc2 - ri2))};
}

double perfect_kappa_of_mu(const CylinderSpec& s, double mu) {
  const auto [lo, hi] = mu_limits(s);
  if (!(mu > lo && mu < hi)) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "axisym: mu = %.6g outside the admissible interval (%.6g, %.6g)", mu, lo, hi);
    throw config_error(buf);
  }
  const double ri2 = s.r_i * s.r_i, rc2 = s.r_c * s.r_c;
  const double lm = s.kappa0 + s.mu0 / 3.0;  // lambda0 + mu0
  return mu * (lm * (3.0 * rc2 + ri2) - mu * (rc2 - ri2)) / (3.0 * (mu * (rc2 - ri2) - ri2 * lm));
}

double minimize_uniform_P(const CylinderSpec& s, double lo, double hi) {
  auto g = [&](double P) { return objective(solve(s, RadialProfile::uniform_p(P))); };
  const auto r = boost::math::tools::brent_find_minima(g, lo, hi, std::numeric_limits<double>::digits);
  return r.first;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(static_cast<std::size_t>(std::max(n, 0)));
  for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return v;
}

Landscape objective_landscape(const CylinderSpec& s, ProfileKind kind, const std::vector<double>& param1,
                              const std::vector<double>& param2) {
  Landscape L;
  L.kind = kind;
  L.param1 = param1;
  if (kind == ProfileKind::UniformP) {
    for (double P : param1) L.g.push_back(objective(solve(s, RadialProfile::uniform_p(P))));
    return L;
  }
  if (param2.empty()) throw config_error("axisym: two-parameter landscape needs a second grid");
  L.param2 = param2;
  for (double a : param1)
    for (double b : param2) {
      const RadialProfile p = kind == ProfileKind::UniformKappaMu ? RadialProfile::uniform_kappa_mu(a, b)
                                                                  : RadialProfile::linear_p(a, b);
      L.g.push_back(objective(solve(s, p)));
    }
  return L;
}

std::string Landscape::to_csv() const {
  std::string out = "param1,param2,g\n";
  char buf[96];
  if (param2.empty()) {
    for (std::size_t i = 0; i < param1.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g,0,%.17g\n", param1[i], g[i]);
      out += buf;
    }
    return out;
  }
  for (std::size_t i = 0; i < param1.size(); ++i)
    for (std::size_t j = 0; j < param2.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", param1[i], param2[j], g[i * param2.size() + j]);
      out += buf;
    }
  return out;
}

TransformedModuli isotropic_moduli(double kappa, double mu, double r) {
  TransformedModuli m;
  m.Crrrr = kappa + 4.0 * mu / 3.0;
  m.Crrtt = (kappa - 2.0 * mu / 3.0) / (r * r);
  m.Ctttt = (kappa + 4.0 * mu / 3.0) / (r * r * r * r);
  return m;
}

TransformedModuli transformation_moduli(double kappa, double mu, double r, double f, double fp) {
  if (!(f > 0.0 && fp > 0.0 && r > 0.0)) throw config_error("axisym: cloaking map must be positive and increasing");
  const double c = 3.0 * kappa + 4.0 * mu;
  TransformedModuli m;
  m.Crrrr = c * f / (3.0 * r * fp);
  m.Crrtt = (3.0 * kappa - 2.0 * mu) / (3.0 * r * r);
  m.Ctttt = c * fp / (3.0 * r * r * r * f);
  // Isotropy requires r^4 C^tttt = C^rrrr.
  const double t = m.Ctttt * r * r * r * r;
  m.isotropy_residual = std::abs(t - m.Crrrr) / std::max(std::abs(t), std::abs(m.Crrrr));
  return m;
}

}  // namespace cloak::axisym
