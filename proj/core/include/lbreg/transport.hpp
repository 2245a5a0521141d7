#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "lbreg/geometry.hpp"

namespace lbreg {

/// One nonzero of a coupling.
struct PlanEntry {
  int row = 0;
  int col = 0;
  double mass = 0.0;

  friend bool operator==(const PlanEntry&, const PlanEntry&) = default;
};

/// Nonnegative coupling sigma with marginals sigma 1 = mu, sigma^T 1 = nu.
/// Entries are kept sorted by (row, col) without duplicates.
class TransportPlan {
public:
  TransportPlan() = default;

  /// Validates nonnegativity and both marginals (within `marginal_tol`).
  /// Duplicate (row, col) entries are summed.
  TransportPlan(std::vector<PlanEntry> entries, Eigen::VectorXd row_marginal,
                Eigen::VectorXd col_marginal, double marginal_tol = 1e-10);

  /// sigma = diag(mu) for equal-sized measures.
  static TransportPlan diagonal(const Eigen::VectorXd& mu);
  /// sigma_ij = mu_i nu_j.
  static TransportPlan product(const Eigen::VectorXd& mu, const Eigen::VectorXd& nu);
  /// (1/L) sum of plans sharing marginals.
  static TransportPlan average(std::span<const TransportPlan> plans);

  const std::vector<PlanEntry>& entries() const noexcept { return entries_; }
  const Eigen::VectorXd& row_marginal() const noexcept { return mu_; }
  const Eigen::VectorXd& col_marginal() const noexcept { return nu_; }
  Eigen::Index rows() const noexcept { return mu_.size(); }
  Eigen::Index cols() const noexcept { return nu_.size(); }
  std::size_t nonzeros() const noexcept { return entries_.size(); }

  SparseRowMatrix matrix() const;
  Eigen::MatrixXd dense() const;

  /// max(|sigma 1 - mu|_inf, |sigma^T 1 - nu|_inf)
  double marginal_error() const;

private:
  std::vector<PlanEntry> entries_;
  Eigen::VectorXd mu_;
  Eigen::VectorXd nu_;
};

struct TransportResult {
  TransportPlan plan;
  double cost = 0.0;
};

/// Closed-form 1-D optimal transport under squared distance: sort both
/// sides and fill sigma_hat_ij = |(s_{i-1}, s_i] cap (h_{j-1}, h_j]| from the
/// prefix sums of the sorted weights. O(N log N).
TransportResult ot_1d(std::span<const double> x, std::span<const double> mu,
                      std::span<const double> y, std::span<const double> nu);
TransportResult ot_1d(const Eigen::VectorXd& x, const Eigen::VectorXd& mu,
                      const Eigen::VectorXd& y, const Eigen::VectorXd& nu);

inline constexpr std::size_t kExactSizeLimit = 1'000'000;

struct ExactOptions {
  std::size_t size_limit = kExactSizeLimit;  ///< max rows * cols
  std::size_t max_pivots = 0;                ///< 0 = automatic cap
};

/// Exact discrete OT by the transportation simplex (northwest-corner start,
/// stepping-stone pivots; Dantzig pricing that falls back to Bland's rule
/// during runs of degenerate pivots).
TransportResult ot_exact(const Eigen::MatrixXd& costs, const Eigen::VectorXd& mu,
                         const Eigen::VectorXd& nu, const ExactOptions& options = {});

/// Squared Euclidean cost matrix between the rows of a and b.
Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Pi = diag(1/mu) sigma with row-argmax assignment.
Correspondence plan_to_map(const TransportPlan& plan);

/// Row i = (1/mu_i) sum_j sigma_ij targets_j.
Eigen::MatrixXd interpolated_image(const TransportPlan& plan, const Eigen::MatrixXd& targets);

/// True if no two support cells (i, j), (i', j') cross: x_i < x_i' but y_j > y_j'.
bool is_monotone(const TransportPlan& plan, std::span<const double> x, std::span<const double> y);

/// Checks that weights are positive and sum to one within `tol`.
void require_probability(std::span<const double> w, const char* what, double tol = 1e-12);

}  // namespace lbreg
