#include "lbreg/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "lbreg/error.hpp"

namespace lbreg {

namespace {

constexpr double kMeasureSumTol = 1e-12;
constexpr double kRowSumTol = 1e-10;

void check_triangles(const std::vector<Triangle>& triangles, Eigen::Index n) {
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    const auto& tri = triangles[t];
    for (int v : tri) {
      if (v < 0 || v >= n) {
        std::ostringstream msg;
        msg << "triangle " << t << " references vertex " << v << " outside [0, " << n << ")";
        throw DegenerateInput(msg.str());
      }
    }
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
      throw DegenerateInput("triangle " + std::to_string(t) + " repeats a vertex");
    }
  }
}

void check_distinct(const Eigen::MatrixXd& pts) {
  const Eigen::Index n = pts.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  auto less = [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index c = 0; c < pts.cols(); ++c) {
      if (pts(a, c) != pts(b, c)) return pts(a, c) < pts(b, c);
    }
    return false;
  };
  std::sort(order.begin(), order.end(), less);
  for (std::size_t k = 1; k < order.size(); ++k) {
    if (!less(order[k - 1], order[k])) {
      std::ostringstream msg;
      msg << "points " << std::min(order[k - 1], order[k]) << " and "
          << std::max(order[k - 1], order[k]) << " coincide";
      throw DegenerateInput(msg.str());
    }
  }
}

}  // namespace

PointCloud::PointCloud(Eigen::MatrixXd points, std::vector<Triangle> triangles,
                       Eigen::VectorXd measure, std::string name)
    : points_(std::move(points)),
      triangles_(std::move(triangles)),
      measure_(std::move(measure)),
      name_(std::move(name)) {
  if (measure_.size() == 0 && points_.rows() > 0) {
    measure_ = Eigen::VectorXd::Constant(points_.rows(), 1.0 / static_cast<double>(points_.rows()));
  }
  validate();
}

void PointCloud::validate() const {
  if (points_.rows() == 0) throw DegenerateInput("point cloud is empty");
  if (!points_.allFinite()) throw DegenerateInput("point cloud has non-finite coordinates");
  if (measure_.size() != points_.rows()) {
    throw DimensionMismatch("measure length " + std::to_string(measure_.size()) +
                            " does not match point count " + std::to_string(points_.rows()));
  }
  for (Eigen::Index i = 0; i < measure_.size(); ++i) {
    if (!(measure_[i] > 0.0) || !std::isfinite(measure_[i])) {
      throw DegenerateInput("measure entry " + std::to_string(i) + " is not strictly positive");
    }
  }
  if (std::abs(measure_.sum() - 1.0) > kMeasureSumTol) {
    throw DegenerateInput("measure does not sum to 1");
  }
  check_triangles(triangles_, points_.rows());
  check_distinct(points_);
}

PointCloud PointCloud::with_measure(Eigen::VectorXd measure) const {
  return PointCloud(points_, triangles_, std::move(measure), name_);
}

PointCloud PointCloud::with_points(Eigen::MatrixXd points) const {
  return PointCloud(std::move(points), triangles_, measure_, name_);
}

PointCloud PointCloud::with_triangles(std::vector<Triangle> triangles) const {
  return PointCloud(points_, std::move(triangles), measure_, name_);
}

PointCloud PointCloud::with_name(std::string name) const {
  PointCloud copy = *this;
  copy.name_ = std::move(name);
  return copy;
}

Correspondence::Correspondence(SparseRowMatrix pi) : pi_(std::move(pi)) {
  pi_.makeCompressed();
  assignment_.assign(static_cast<std::size_t>(pi_.rows()), 0);
  for (Eigen::Index i = 0; i < pi_.rows(); ++i) {
    double sum = 0.0;
    double best = -1.0;
    int best_col = -1;
    for (SparseRowMatrix::InnerIterator it(pi_, i); it; ++it) {
      if (it.value() < 0.0) throw DegenerateInput("correspondence matrix has a negative entry");
      sum += it.value();
      const int col = static_cast<int>(it.col());
      if (it.value() > best || (it.value() == best && col < best_col)) {
        best = it.value();
        best_col = col;
      }
    }
    if (std::abs(sum - 1.0) > kRowSumTol) {
      throw DegenerateInput("correspondence row " + std::to_string(i) + " does not sum to 1");
    }
    assignment_[static_cast<std::size_t>(i)] = best_col;
  }
}

Correspondence Correspondence::from_assignment(std::vector<int> assignment, std::size_t target_size) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(assignment.size());
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    const int j = assignment[i];
    if (j < 0 || static_cast<std::size_t>(j) >= target_size) {
      throw DimensionMismatch("assignment entry " + std::to_string(i) + " = " + std::to_string(j) +
                              " is outside the target range");
    }
    trips.emplace_back(static_cast<int>(i), j, 1.0);
  }
  SparseRowMatrix pi(static_cast<Eigen::Index>(assignment.size()),
                     static_cast<Eigen::Index>(target_size));
  pi.setFromTriplets(trips.begin(), trips.end());
  return Correspondence(std::move(pi));
}

Eigen::VectorXd triangle_areas(const PointCloud& shape) {
  const auto& pts = shape.points();
  const auto& tris = shape.triangles();
  Eigen::VectorXd areas(static_cast<Eigen::Index>(tris.size()));
  for (std::size_t t = 0; t < tris.size(); ++t) {
    const Eigen::VectorXd a = pts.row(tris[t][0]).transpose();
    const Eigen::VectorXd e1 = pts.row(tris[t][1]).transpose() - a;
    const Eigen::VectorXd e2 = pts.row(tris[t][2]).transpose() - a;
    // Gram determinant works for any ambient dimension.
    const double g = e1.squaredNorm() * e2.squaredNorm() - std::pow(e1.dot(e2), 2);
    areas[static_cast<Eigen::Index>(t)] = 0.5 * std::sqrt(std::max(g, 0.0));
  }
  return areas;
}

PointCloud voronoi_measure(const PointCloud& shape) {
  if (!shape.has_triangles()) throw MissingConnectivity("voronoi measure needs triangles");
  const Eigen::VectorXd areas = triangle_areas(shape);
  const double total = areas.sum();
  if (!(total > 0.0)) throw DegenerateInput("mesh has zero total area");

  Eigen::VectorXd weights = Eigen::VectorXd::Zero(shape.size());
  const auto& tris = shape.triangles();
  for (std::size_t t = 0; t < tris.size(); ++t) {
    for (int v : tris[t]) weights[v] += areas[static_cast<Eigen::Index>(t)] / 3.0;
  }
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    if (!(weights[i] > 0.0)) {
      throw DegenerateInput("vertex " + std::to_string(i) + " has zero dual area");
    }
  }
  weights /= weights.sum();
  return shape.with_measure(std::move(weights));
}

double total_edge_length(const Eigen::MatrixXd& points, const std::vector<Triangle>& triangles) {
  std::set<std::pair<int, int>> edges;
  for (const auto& tri : triangles) {
    for (int k = 0; k < 3; ++k) {
      int a = tri[static_cast<std::size_t>(k)];
      int b = tri[static_cast<std::size_t>((k + 1) % 3)];
      if (a == b) continue;
      if (a > b) std::swap(a, b);
      edges.emplace(a, b);
    }
  }
  double total = 0.0;
  for (const auto& [a, b] : edges) total += (points.row(a) - points.row(b)).norm();
  return total;
}

TransferResult transfer_connectivity(const PointCloud& source, const PointCloud& target,
                                     const Correspondence& corr) {
  if (!source.has_triangles()) throw MissingConnectivity("source shape has no triangles");
  if (corr.source_size() != static_cast<std::size_t>(source.size()) ||
      corr.target_size() != static_cast<std::size_t>(target.size())) {
    throw DimensionMismatch("correspondence shape does not match source/target sizes");
  }
  const auto& a = corr.assignment();
  TransferResult result;
  std::vector<Triangle> moved;
  moved.reserve(source.triangles().size());
  for (const auto& tri : source.triangles()) {
    const Triangle t{a[static_cast<std::size_t>(tri[0])], a[static_cast<std::size_t>(tri[1])],
                     a[static_cast<std::size_t>(tri[2])]};
    ++result.transferred;
    if (t[0] != t[1] && t[1] != t[2] && t[0] != t[2]) {
      moved.push_back(t);
      ++result.nondegenerate;
    }
  }
  result.quality = result.transferred == 0
                       ? 0.0
                       : static_cast<double>(result.nondegenerate) / static_cast<double>(result.transferred);
  if (target.has_triangles()) {
    const double own = total_edge_length(target.points(), target.triangles());
    if (own > 0.0) result.edge_length_ratio = total_edge_length(target.points(), moved) / own;
  }
  result.mesh = target.with_triangles(std::move(moved));
  return result;
}

PointCloud permute_points(const PointCloud& cloud, const std::vector<int>& perm) {
  const Eigen::Index n = cloud.size();
  if (static_cast<Eigen::Index>(perm.size()) != n) throw DimensionMismatch("permutation length mismatch");
  std::vector<int> inverse(perm.size(), -1);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    const int old = perm[i];
    if (old < 0 || old >= n || inverse[static_cast<std::size_t>(old)] != -1) {
      throw DegenerateInput("not a permutation");
    }
    inverse[static_cast<std::size_t>(old)] = static_cast<int>(i);
  }
  Eigen::MatrixXd pts(n, cloud.ambient_dim());
  Eigen::VectorXd mu(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    pts.row(i) = cloud.points().row(perm[static_cast<std::size_t>(i)]);
    mu[i] = cloud.measure()[perm[static_cast<std::size_t>(i)]];
  }
  std::vector<Triangle> tris;
  tris.reserve(cloud.triangles().size());
  for (const auto& t : cloud.triangles()) {
    tris.push_back({inverse[static_cast<std::size_t>(t[0])], inverse[static_cast<std::size_t>(t[1])],
                    inverse[static_cast<std::size_t>(t[2])]});
  }
  // Renormalize: the permuted sum can differ from the original in the last ulp.
  mu /= mu.sum();
  return PointCloud(std::move(pts), std::move(tris), std::move(mu), cloud.name());
}

}  // namespace lbreg
