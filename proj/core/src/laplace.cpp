#include "lbreg/laplace.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "lbreg/error.hpp"

namespace lbreg {

std::string_view to_string(LaplaceMethod method) noexcept {
  return method == LaplaceMethod::CotanFem ? "cotan_fem" : "kernel_graph";
}

std::optional<LaplaceMethod> parse_laplace_method(std::string_view name) {
  if (name == "cotan_fem" || name == "cotan") return LaplaceMethod::CotanFem;
  if (name == "kernel_graph" || name == "kernel") return LaplaceMethod::KernelGraph;
  return std::nullopt;
}

DiscreteLB assemble_cotan(const PointCloud& shape) {
  if (!shape.has_triangles()) throw MissingConnectivity("cotangent Laplacian needs triangles");
  const Eigen::Index n = shape.size();
  const auto& pts = shape.points();

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(shape.triangles().size() * 12);
  Eigen::VectorXd mass = Eigen::VectorXd::Zero(n);

  for (std::size_t t = 0; t < shape.triangles().size(); ++t) {
    const auto& tri = shape.triangles()[t];
    const Eigen::VectorXd p[3] = {pts.row(tri[0]).transpose(), pts.row(tri[1]).transpose(),
                                  pts.row(tri[2]).transpose()};
    const Eigen::VectorXd e1 = p[1] - p[0];
    const Eigen::VectorXd e2 = p[2] - p[0];
    const double gram = e1.squaredNorm() * e2.squaredNorm() - std::pow(e1.dot(e2), 2);
    const double twice_area = std::sqrt(std::max(gram, 0.0));
    if (!(twice_area > 0.0)) throw DegenerateInput("triangle " + std::to_string(t) + " has zero area");

    for (int k = 0; k < 3; ++k) {
      // Angle at corner k is opposite the edge (i, j).
      const int i = (k + 1) % 3;
      const int j = (k + 2) % 3;
      const Eigen::VectorXd a = p[i] - p[k];
      const Eigen::VectorXd b = p[j] - p[k];
      const double half_cot = 0.5 * a.dot(b) / twice_area;
      const int vi = tri[static_cast<std::size_t>(i)];
      const int vj = tri[static_cast<std::size_t>(j)];
      trips.emplace_back(vi, vj, -half_cot);
      trips.emplace_back(vj, vi, -half_cot);
      trips.emplace_back(vi, vi, half_cot);
      trips.emplace_back(vj, vj, half_cot);
      mass[tri[static_cast<std::size_t>(k)]] += twice_area / 6.0;
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(mass[i] > 0.0)) throw DegenerateInput("vertex " + std::to_string(i) + " touches no triangle");
  }

  DiscreteLB op;
  op.stiffness.resize(n, n);
  op.stiffness.setFromTriplets(trips.begin(), trips.end());
  op.stiffness.makeCompressed();
  op.mass = std::move(mass);
  op.method = LaplaceMethod::CotanFem;
  op.intrinsic_dim = 2;
  return op;
}

namespace {

/// Indices of the k nearest neighbours of every point (brute force).
std::vector<std::vector<int>> knn(const Eigen::MatrixXd& pts, int k, std::vector<double>* kth_sq = nullptr) {
  const int n = static_cast<int>(pts.rows());
  std::vector<std::vector<int>> out(static_cast<std::size_t>(n));
  std::vector<std::pair<double, int>> d(static_cast<std::size_t>(n - 1));
  if (kth_sq) kth_sq->assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    std::size_t c = 0;
    for (int j = 0; j < n; ++j) {
      if (j != i) d[c++] = {(pts.row(i) - pts.row(j)).squaredNorm(), j};
    }
    const auto kk = static_cast<std::ptrdiff_t>(std::min(k, n - 1));
    std::partial_sort(d.begin(), d.begin() + kk, d.end());
    auto& nb = out[static_cast<std::size_t>(i)];
    for (std::ptrdiff_t q = 0; q < kk; ++q) nb.push_back(d[static_cast<std::size_t>(q)].second);
    if (kth_sq) (*kth_sq)[static_cast<std::size_t>(i)] = d[static_cast<std::size_t>(kk - 1)].first;
  }
  return out;
}

}  // namespace

DiscreteLB assemble_kernel(const PointCloud& shape, double bandwidth, int neighbors, int intrinsic_dim) {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) throw DegenerateInput("bandwidth must be positive");
  if (neighbors < 4) throw DegenerateInput("kernel Laplacian needs at least 4 neighbours");
  if (intrinsic_dim < 1) throw DegenerateInput("intrinsic dimension must be positive");
  const Eigen::Index n = shape.size();
  if (n < 2) throw DegenerateInput("kernel Laplacian needs at least 2 points");
  const auto& pts = shape.points();

  const auto nbrs = knn(pts, neighbors);
  std::set<std::pair<int, int>> pairs;
  for (int i = 0; i < static_cast<int>(n); ++i) {
    for (int j : nbrs[static_cast<std::size_t>(i)]) pairs.emplace(std::min(i, j), std::max(i, j));
  }

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(pairs.size() * 2);
  Eigen::VectorXd degree = Eigen::VectorXd::Zero(n);
  for (const auto& [i, j] : pairs) {
    const double w = std::exp(-(pts.row(i) - pts.row(j)).squaredNorm() / (4.0 * bandwidth));
    if (w == 0.0) continue;
    trips.emplace_back(i, j, -w);
    trips.emplace_back(j, i, -w);
    degree[i] += w;
    degree[j] += w;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(degree[i] > 0.0)) {
      throw DegenerateInput("point " + std::to_string(i) + " has no kernel weight; bandwidth too small");
    }
    trips.emplace_back(static_cast<int>(i), static_cast<int>(i), degree[i]);
  }

  DiscreteLB op;
  op.stiffness.resize(n, n);
  op.stiffness.setFromTriplets(trips.begin(), trips.end());
  op.stiffness.makeCompressed();
  // the density estimate counts the self weight w_ii = 1
  op.mass = bandwidth * (degree.array() + 1.0).matrix();
  op.method = LaplaceMethod::KernelGraph;
  op.intrinsic_dim = intrinsic_dim;
  return op;
}

double default_bandwidth(const PointCloud& shape, int neighbors) {
  std::vector<double> kth;
  knn(shape.points(), std::max(neighbors, 1), &kth);
  const double mean = std::accumulate(kth.begin(), kth.end(), 0.0) / static_cast<double>(kth.size());
  return mean / 16.0;
}

DiscreteLB assemble_default(const PointCloud& shape, int neighbors) {
  if (shape.has_triangles()) return assemble_cotan(shape);
  return assemble_kernel(shape, default_bandwidth(shape, neighbors), neighbors);
}

}  // namespace lbreg
