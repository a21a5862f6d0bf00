#pragma once

#include <string>
#include <vector>

namespace cloak::axisym {

/// Hollow cylinder r_i < r < r_o with a cloak annulus r_i < r < r_c under far-field radial traction.
struct CylinderSpec {
  double r_i = 0.5, r_c = 1.0, r_o = 2.0;
  double mu0 = 1.0, kappa0 = 1.0;
  double sigma_inf = 1.0;

  void validate() const;
};

enum class ProfileKind { UniformP, UniformKappaMu, LinearP };

std::string to_string(ProfileKind k);
ProfileKind parse_profile_kind(const std::string& s);

/// Cloak moduli on [r_i, r_c]. Parameters: UniformP (P), UniformKappaMu (kappa, mu), LinearP (P_i, P_c).
struct RadialProfile {
  ProfileKind kind = ProfileKind::UniformP;
  double p1 = 1.0, p2 = 0.0;

  static RadialProfile uniform_p(double p) { return {ProfileKind::UniformP, p, 0.0}; }
  static RadialProfile uniform_kappa_mu(double kappa, double mu) { return {ProfileKind::UniformKappaMu, kappa, mu}; }
  static RadialProfile linear_p(double pi, double pc) { return {ProfileKind::LinearP, pi, pc}; }

  double mu(const CylinderSpec& s, double r) const;
  double kappa(const CylinderSpec& s, double r) const;
  double dmu(const CylinderSpec& s) const;
  double dkappa(const CylinderSpec& s) const;
};

struct VirtualSolution {
  double C1 = 0.0;
  double u(double r) const { return C1 * r; }
  double srr() const { return sigma; }
  double sigma = 0.0;
};

VirtualSolution virtual_solution(const CylinderSpec& s);

/// Outer constant C2 of u = C1 r + C2 / r from the traction condition at r_o.
double outer_constants(const CylinderSpec& s, double C1);

/// Closed-form objective as a function of the outer constant C1.
double objective_from_C1(const CylinderSpec& s, double C1);

/// Radial stress (physical component) for moduli (kappa, mu) and (u, u') at r.
double radial_stress(double kappa, double mu, double r, double u, double du);

/// Displacement of the physical cylinder: inner field on [r_i, r_c], outer C1 r + C2 / r on [r_c, r_o].
struct RadialSolution {
  CylinderSpec spec;
  RadialProfile profile;
  double C1 = 0.0, C2 = 0.0;
  // Closed-form inner coefficients (uniform kinds).
  bool closed_form = false;
  double D1 = 0.0, D2 = 0.0;
  // Sampled inner field (ODE path): r, u, u'.
  std::vector<double> r, u_s, du_s;

  double u(double r) const;
  double du(double r) const;
  double srr(double r) const;
};

/// Closed-form solve for uniform profiles, ODE otherwise.
RadialSolution solve(const CylinderSpec& s, const RadialProfile& p);

/// Shooting solve of the variable-coefficient radial equation on [r_i, r_c] (adaptive Dormand-Prince,
/// relative tolerance 1e-10); works for every profile kind.
RadialSolution solve_radial_ode(const CylinderSpec& s, const RadialProfile& p, int samples = 201);

/// Residual of the radial balance equation for a given field at r.
double balance_residual(const CylinderSpec& s, const RadialProfile& p, double r, double u, double du, double ddu);

/// pi * int_{r_c}^{r_o} (u - ut)^2 r dr by adaptive Gauss-Kronrod (relative tolerance 1e-12).
double objective(const RadialSolution& sol);

/// Uniform P with vanishing objective.
double perfect_uniform_P(const CylinderSpec& s);

/// Open interval of mu for which the perfect-cloak kappa is positive.
std::pair<double, double> mu_limits(const CylinderSpec& s);

/// kappa on the zero locus of the uniform (kappa, mu) objective; throws outside mu_limits.
double perfect_kappa_of_mu(const CylinderSpec& s, double mu);

/// Minimizer of g(P) for uniform P over [lo, hi] (Brent).
double minimize_uniform_P(const CylinderSpec& s, double lo, double hi);

struct Landscape {
  ProfileKind kind = ProfileKind::UniformP;
  std::vector<double> param1, param2;  // param2 empty for UniformP
  std::vector<double> g;               // row-major: index i1 * size(param2) + i2

  /// CSV with header param1,param2,g (param2 = 0 for one-parameter curves).
  std::string to_csv() const;
};

std::vector<double> linspace(double a, double b, int n);

/// Objective sampled on a grid. For UniformKappaMu param1 is kappa and param2 is mu;
/// for LinearP they are P_i and P_c.
Landscape objective_landscape(const CylinderSpec& s, ProfileKind kind, const std::vector<double>& param1,
                              const std::vector<double>& param2 = {});

struct TransformedModuli {
  double Crrrr = 0.0, Crrtt = 0.0, Ctttt = 0.0;
  double isotropy_residual = 0.0;
};

/// Curvilinear moduli produced by a radial cloaking map f with derivative fp at r, and the relative
/// defect against the isotropic template (zero iff f = r f').
TransformedModuli transformation_moduli(double kappa, double mu, double r, double f, double fp);

/// Isotropic curvilinear moduli at r.
TransformedModuli isotropic_moduli(double kappa, double mu, double r);

}  // namespace cloak::axisym
