#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "cloak/material.hpp"
#include "cloak/mesh.hpp"

namespace cloak {

/// Normalized L2 distance sqrt(int |u - ut|^2 / int |ut|^2) over EXTERIOR triangles (or the
/// triangles selected by `mask` when given). Fields are node-interleaved (2 x nodes).
double g_hat(const Eigen::VectorXd& u, const Eigen::VectorXd& utilde, const Mesh& mesh,
             const std::vector<char>& mask = {});

/// Weighted sum of per-load ratios.
double g_hat_multi(const std::vector<double>& ratios, const std::vector<double>& weights);

struct MetricWeights {
  double m1 = 1.0, m2 = 1.0, alpha1 = 1.0, alpha2 = 1.0;
};

/// H1-type distance between two nodal design fields (indexed by mesh node) over CLOAK
/// triangles. Passing zero fields for the second design gives the distance to the base material.
double design_metric(const Eigen::VectorXd& xi1, const Eigen::VectorXd& eta1, const Eigen::VectorXd& xi2,
                     const Eigen::VectorXd& eta2, const Mesh& mesh, const MetricWeights& w);

/// Area of the cloak where the centroid Poisson ratio is negative, divided by the cloak area.
double auxetic_fraction(const Eigen::VectorXd& xi, const Eigen::VectorXd& eta, const Mesh& mesh,
                        const BaseMaterial& base);

/// Efficacy table: rows are designs, columns service loads, values ratios (not percent).
struct EfficacyTable {
  std::vector<std::string> rows;
  std::vector<std::string> cols;
  std::vector<std::vector<double>> values;

  /// CSV with percentages at one decimal and an `average` column.
  std::string to_csv() const;
};

}  // namespace cloak
