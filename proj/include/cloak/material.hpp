#pragma once

#include <utility>

#include <Eigen/Core>

namespace cloak {

/// Base (unperturbed) isotropic moduli.
struct BaseMaterial {
  double mu0 = 1.0;
  double kappa0 = 2.0;
};

struct Moduli {
  double mu;
  double kappa;
  double lambda;
};

/// mu = mu0 exp(-xi), kappa = kappa0 exp(-eta), lambda = kappa - 2 mu / 3.
Moduli moduli(const BaseMaterial& base, double xi, double eta);

/// nu = (3 kappa - 2 mu) / (2 (3 kappa + mu)).
double poisson_ratio(double mu, double kappa);
inline bool is_auxetic(double mu, double kappa) { return poisson_ratio(mu, kappa) < 0.0; }

/// Stress of a displacement gradient for the design point (xi, eta), Cartesian frame.
Eigen::Matrix2d stress(const BaseMaterial& base, double xi, double eta, const Eigen::Matrix2d& grad_y);

/// Mixed work densities (W1, W2) of the gradients of u and of the adjoint field gamma.
std::pair<double, double> work_densities(const BaseMaterial& base, double xi, double eta,
                                         const Eigen::Matrix2d& grad_u, const Eigen::Matrix2d& grad_gamma);

}  // namespace cloak
