#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "lbreg/geometry.hpp"
#include "lbreg/laplace.hpp"

namespace lbreg {

/// Scale-invariant spectral embedding: row i is
/// (phi_1(u_i) / lambda_1^{d/4}, ..., phi_n(u_i) / lambda_n^{d/4}).
struct Embedding {
  Eigen::MatrixXd coords;   ///< l x n
  Eigen::VectorXd measure;  ///< probability weights of the source shape
  int intrinsic_dim = 2;
  std::string source_name;

  Eigen::Index size() const noexcept { return coords.rows(); }
  Eigen::Index dim() const noexcept { return coords.cols(); }

  /// First m columns; identical to embedding with m eigenpairs.
  Embedding truncated(Eigen::Index m) const;
};

Embedding embed(const LBSpectrum& spectrum, const PointCloud& shape, int n);

/// One nested truncation per entry of a strictly increasing schedule.
std::vector<Embedding> multiscale_embed(const LBSpectrum& spectrum, const PointCloud& shape,
                                        const std::vector<int>& schedule);

/// Dimension ladder used by the multi-scale experiments.
inline const std::vector<int> kPaperSchedule{3, 5, 10, 20, 30, 50, 80, 120, 150, 200};

}  // namespace lbreg
