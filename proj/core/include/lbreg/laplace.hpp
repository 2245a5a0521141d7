#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "lbreg/geometry.hpp"

namespace lbreg {

using SparseMatrix = Eigen::SparseMatrix<double>;

enum class LaplaceMethod { CotanFem, KernelGraph };

std::string_view to_string(LaplaceMethod method) noexcept;
std::optional<LaplaceMethod> parse_laplace_method(std::string_view name);

/// Stiffness/mass pair discretizing the Laplace-Beltrami operator:
/// S phi = lambda M phi. M is diagonal (lumped).
struct DiscreteLB {
  SparseMatrix stiffness;
  Eigen::VectorXd mass;  ///< diagonal of M, strictly positive
  LaplaceMethod method = LaplaceMethod::CotanFem;
  int intrinsic_dim = 2;

  Eigen::Index size() const noexcept { return mass.size(); }
};

/// Leading nontrivial eigenpairs, ascending, M-orthonormal columns.
struct LBSpectrum {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenfunctions;  ///< l x n
  LaplaceMethod method = LaplaceMethod::CotanFem;
  int intrinsic_dim = 2;

  Eigen::Index size() const noexcept { return eigenvalues.size(); }
  Eigen::Index points() const noexcept { return eigenfunctions.rows(); }
};

/// Cotangent stiffness and barycentric lumped mass (intrinsic_dim = 2).
DiscreteLB assemble_cotan(const PointCloud& shape);

/// Gaussian-kernel graph Laplacian over symmetrized k-nearest neighbours:
/// w_ij = exp(-|u_i - u_j|^2 / (4 bandwidth)), S = D - W, M = bandwidth * (D + I)
/// (the degree including the self weight).
DiscreteLB assemble_kernel(const PointCloud& shape, double bandwidth, int neighbors,
                           int intrinsic_dim = 2);

/// Cotan when the shape has triangles, kernel graph otherwise. The kernel
/// bandwidth is derived from the mean k-NN distance.
DiscreteLB assemble_default(const PointCloud& shape, int neighbors = 10);

/// Bandwidth heuristic for raw clouds: mean squared distance to the k-th
/// neighbour, divided by 16.
double default_bandwidth(const PointCloud& shape, int neighbors);

enum class EigenBackend { Auto, Dense, ShiftInvert };

struct EigenOptions {
  EigenBackend backend = EigenBackend::Auto;
  double tolerance = 1e-10;   ///< relative generalized residual target
  int max_iterations = 1000;  ///< shift-invert subspace iterations
  std::uint64_t seed = 0x5eed;
};

/// n smallest nontrivial generalized eigenpairs of (S, M). Within every
/// column the largest-magnitude entry is made positive.
LBSpectrum solve_spectrum(const DiscreteLB& op, int n, const EigenOptions& options = {});

/// max_k |S phi_k - lambda_k M phi_k| / |S phi_k|
double max_relative_residual(const DiscreteLB& op, const LBSpectrum& spectrum);

/// |Phi^T M Phi - I|_max
double orthonormality_error(const DiscreteLB& op, const LBSpectrum& spectrum);

}  // namespace lbreg
