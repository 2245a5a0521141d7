#include <Eigen/Eigenvalues>

#include "lbreg/error.hpp"
#include "lbreg/register.hpp"

namespace lbreg {

namespace {

constexpr int kExhaustiveSignDim = 10;

/// Eigenvectors of the mu-weighted centered covariance, descending.
Eigen::MatrixXd moment_basis(const Embedding& e) {
  const Eigen::RowVectorXd mean = e.measure.transpose() * e.coords;
  const Eigen::MatrixXd centered = e.coords.rowwise() - mean;
  Eigen::MatrixXd cov = centered.transpose() * e.measure.asDiagonal() * centered;
  cov = 0.5 * (cov + cov.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  if (es.info() != Eigen::Success) throw ConvergenceFailure("covariance eigendecomposition failed");
  return es.eigenvectors().rowwise().reverse();
}

}  // namespace

std::string_view to_string(InitStrategy strategy) noexcept {
  return strategy == InitStrategy::Identity ? "identity" : "moments";
}

std::optional<InitStrategy> parse_init_strategy(std::string_view name) {
  if (name == "identity") return InitStrategy::Identity;
  if (name == "moments") return InitStrategy::Moments;
  return std::nullopt;
}

OrthogonalMatrix moment_initialization(const Embedding& p, const Embedding& q, const DirectionSet& dirs,
                                       int score_directions) {
  if (p.dim() != q.dim() || dirs.dim() != p.dim()) throw DimensionMismatch("initialization dimensions differ");
  const int n = static_cast<int>(p.dim());
  const Eigen::MatrixXd up = moment_basis(p);
  const Eigen::MatrixXd uq = moment_basis(q);
  const Eigen::MatrixXd theta = dirs.directions().topRows(std::clamp(score_directions, 1, dirs.count()));

  auto candidate = [&](const Eigen::VectorXd& signs) {
    return Eigen::MatrixXd(up * signs.asDiagonal() * uq.transpose());
  };
  auto score = [&](const Eigen::MatrixXd& r) {
    return rswd_eval(p.coords, p.measure, q.coords, q.measure, r, theta).value;
  };

  Eigen::VectorXd best_signs = Eigen::VectorXd::Ones(n);
  double best = score(candidate(best_signs));
  if (n <= kExhaustiveSignDim) {
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
      Eigen::VectorXd signs(n);
      for (int k = 0; k < n; ++k) signs[k] = (mask >> k) & 1u ? -1.0 : 1.0;
      const double e = score(candidate(signs));
      if (e < best) {
        best = e;
        best_signs = signs;
      }
    }
  } else {
    for (int pass = 0; pass < 2; ++pass) {
      for (int k = 0; k < n; ++k) {
        Eigen::VectorXd signs = best_signs;
        signs[k] = -signs[k];
        const double e = score(candidate(signs));
        if (e < best) {
          best = e;
          best_signs = signs;
        }
      }
    }
  }
  return OrthogonalMatrix::nearest(candidate(best_signs));
}

OrthogonalMatrix cold_start(const Embedding& p, const Embedding& q, const DirectionSet& dirs, InitStrategy strategy) {
  if (strategy == InitStrategy::Identity) return OrthogonalMatrix::identity(p.dim());
  return moment_initialization(p, q, dirs);
}

}  // namespace lbreg
