#pragma once

#include <vector>

#include <Eigen/Core>

#include "lbreg/geometry.hpp"

namespace lbreg::detail {

/// Outward-oriented triangulation of the convex hull of an l x 3 point set.
/// Every input point must be a hull vertex (points in convex position, such
/// as samples of a sphere); otherwise DegenerateInput is thrown.
std::vector<Triangle> convex_hull_triangles(const Eigen::MatrixXd& points);

}  // namespace lbreg::detail
