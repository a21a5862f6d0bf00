#include "cloak/material.hpp"

#include <cmath>

namespace cloak {

Moduli moduli(const BaseMaterial& base, double xi, double eta) {
  const double mu = base.mu0 * std::exp(-xi);
  const double kappa = base.kappa0 * std::exp(-eta);
  return {mu, kappa, kappa - 2.0 * mu / 3.0};
}

double poisson_ratio(double mu, double kappa) { return (3.0 * kappa - 2.0 * mu) / (2.0 * (3.0 * kappa + mu)); }

Eigen::Matrix2d stress(const BaseMaterial& base, double xi, double eta, const Eigen::Matrix2d& grad_y) {
  const double mu = base.mu0 * std::exp(-xi);
  const double kappa = base.kappa0 * std::exp(-eta);
  const Eigen::Matrix2d sym = 0.5 * (grad_y + grad_y.transpose());
  return (kappa - 2.0 * mu / 3.0) * grad_y.trace() * Eigen::Matrix2d::Identity() + 2.0 * mu * sym;
}

std::pair<double, double> work_densities(const BaseMaterial& base, double xi, double eta,
                                         const Eigen::Matrix2d& grad_u, const Eigen::Matrix2d& grad_gamma) {
  const double mu = base.mu0 * std::exp(-xi);
  const double kappa = base.kappa0 * std::exp(-eta);
  const Eigen::Matrix2d su = 0.5 * (grad_u + grad_u.transpose());
  const Eigen::Matrix2d sg = 0.5 * (grad_gamma + grad_gamma.transpose());
  const double divs = grad_u.trace() * grad_gamma.trace();
  return {-2.0 / 3.0 * mu * divs + 2.0 * mu * (sg.array() * su.array()).sum(), kappa * divs};
}

}  // namespace cloak
