#pragma once

#include <Eigen/Core>

namespace cloak::geom {

/// Sign of the orientation determinant of (a, b, c): +1 counter-clockwise, -1 clockwise,
/// 0 collinear. Exact: a floating-point filter falls back to rational arithmetic.
int orient(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c);

/// +1 if d lies strictly inside the circumcircle of the counter-clockwise triangle (a, b, c),
/// -1 if strictly outside, 0 if cocircular. Exact.
int incircle(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c,
             const Eigen::Vector2d& d);

}  // namespace cloak::geom
