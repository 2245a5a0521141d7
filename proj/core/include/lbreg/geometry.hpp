#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace lbreg {

using Triangle = std::array<int, 3>;
using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// A sampled shape: l points in R^D, optional triangle connectivity and a
/// probability measure over the points.
///
/// Invariants, checked on construction:
///  - the measure is strictly positive and sums to one within 1e-12;
///  - triangle indices lie in [0, l) and no triangle repeats a vertex;
///  - no two points coincide.
class PointCloud {
public:
  PointCloud() = default;

  /// Uniform measure 1/l is attached when `measure` is empty.
  PointCloud(Eigen::MatrixXd points, std::vector<Triangle> triangles,
             Eigen::VectorXd measure = {}, std::string name = {});

  const Eigen::MatrixXd& points() const noexcept { return points_; }
  const std::vector<Triangle>& triangles() const noexcept { return triangles_; }
  const Eigen::VectorXd& measure() const noexcept { return measure_; }
  const std::string& name() const noexcept { return name_; }

  Eigen::Index size() const noexcept { return points_.rows(); }
  Eigen::Index ambient_dim() const noexcept { return points_.cols(); }
  bool has_triangles() const noexcept { return !triangles_.empty(); }

  PointCloud with_measure(Eigen::VectorXd measure) const;
  PointCloud with_points(Eigen::MatrixXd points) const;
  PointCloud with_triangles(std::vector<Triangle> triangles) const;
  PointCloud with_name(std::string name) const;

private:
  void validate() const;

  Eigen::MatrixXd points_;
  std::vector<Triangle> triangles_;
  Eigen::VectorXd measure_;
  std::string name_;
};

/// Row-stochastic correspondence matrix with its max-row assignment
/// (lowest index wins ties).
class Correspondence {
public:
  Correspondence() = default;

  /// Builds the assignment from `pi`; rows must be nonnegative and sum to 1
  /// within 1e-10.
  explicit Correspondence(SparseRowMatrix pi);

  /// One-hot correspondence from an explicit assignment.
  static Correspondence from_assignment(std::vector<int> assignment,
                                        std::size_t target_size);

  std::size_t source_size() const noexcept { return static_cast<std::size_t>(pi_.rows()); }
  std::size_t target_size() const noexcept { return static_cast<std::size_t>(pi_.cols()); }
  const std::vector<int>& assignment() const noexcept { return assignment_; }
  const SparseRowMatrix& matrix() const noexcept { return pi_; }

private:
  SparseRowMatrix pi_;
  std::vector<int> assignment_;
};

enum class ShapeFormat { Off, Ply, Obj, Xyz };

/// Picks the format from the file extension (case-insensitive).
ShapeFormat format_from_path(const std::filesystem::path& path);
std::optional<ShapeFormat> parse_shape_format(std::string_view name);

PointCloud load_shape(const std::filesystem::path& path, ShapeFormat format);
PointCloud load_shape(const std::filesystem::path& path);

struct PlyScalarField {
  std::string name;
  Eigen::VectorXd values;
};

/// Writes an ASCII PLY. Extra per-vertex scalars become `double` vertex
/// properties; `colors` (l x 3, 0..255) become uchar red/green/blue.
void write_ply(const std::filesystem::path& path, const PointCloud& cloud,
               const std::vector<PlyScalarField>& scalars = {},
               const std::optional<Eigen::Matrix<std::uint8_t, Eigen::Dynamic, 3>>& colors = {});

void write_off(const std::filesystem::path& path, const PointCloud& cloud);
void write_xyz(const std::filesystem::path& path, const PointCloud& cloud);

/// Per-vertex weight = one third of the incident triangle area, normalized.
PointCloud voronoi_measure(const PointCloud& shape);

/// Area of every triangle, in triangle order.
Eigen::VectorXd triangle_areas(const PointCloud& shape);

enum class ShapeKind { Sphere, Torus, BumpySphere };

std::optional<ShapeKind> parse_shape_kind(std::string_view name);

/// Deterministic triangulated test shapes.
///  - sphere: unit sphere with exactly `resolution` vertices (an icosphere when
///    resolution = 10*4^k + 2, otherwise a Fibonacci lattice triangulated by
///    its convex hull).
///  - bumpy_sphere: the sphere lattice pushed onto an ellipsoid with a seeded
///    smooth radial perturbation, so the low spectrum is simple.
///  - torus: nu x nv grid torus with nu * nv <= resolution.
PointCloud generate_shape(ShapeKind kind, int resolution, std::uint64_t seed);

struct TransferResult {
  PointCloud mesh;                         ///< target points, transferred (non-degenerate) triangles
  std::size_t transferred = 0;             ///< source triangle count
  std::size_t nondegenerate = 0;
  double quality = 0.0;                    ///< nondegenerate / transferred
  std::optional<double> edge_length_ratio; ///< transferred edge length / target edge length
};

/// Pushes the source triangle list through `corr.assignment()` onto the
/// target points.
TransferResult transfer_connectivity(const PointCloud& source, const PointCloud& target,
                                     const Correspondence& corr);

/// Total length of the unique undirected edges of a triangle list.
double total_edge_length(const Eigen::MatrixXd& points, const std::vector<Triangle>& triangles);

/// Applies `perm` (new index i holds old point perm[i]) to points, measure and
/// triangles. Used to build permuted copies with a known ground truth.
PointCloud permute_points(const PointCloud& cloud, const std::vector<int>& perm);

}  // namespace lbreg
