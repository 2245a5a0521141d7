#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "lbreg/eigenmap.hpp"
#include "lbreg/geometry.hpp"
#include "lbreg/transport.hpp"

namespace lbreg {

/// Member of O(n) (reflections included): |R R^T - I|_F <= 1e-10.
class OrthogonalMatrix {
public:
  OrthogonalMatrix() = default;
  explicit OrthogonalMatrix(Eigen::MatrixXd r, double tol = 1e-10);

  static OrthogonalMatrix identity(Eigen::Index n);
  /// Nearest orthogonal matrix U V^T from the SVD of m.
  static OrthogonalMatrix nearest(const Eigen::MatrixXd& m);
  /// diag(r, I) of size n.
  OrthogonalMatrix embedded(Eigen::Index n) const;

  const Eigen::MatrixXd& matrix() const noexcept { return r_; }
  Eigen::Index dim() const noexcept { return r_.rows(); }

private:
  Eigen::MatrixXd r_;
};

double orthogonality_error(const Eigen::MatrixXd& r);

/// L seeded unit directions in R^n (normalized standard Gaussian rows).
class DirectionSet {
public:
  DirectionSet() = default;
  DirectionSet(int count, int dim, std::uint64_t seed);

  const Eigen::MatrixXd& directions() const noexcept { return theta_; }
  int count() const noexcept { return static_cast<int>(theta_.rows()); }
  int dim() const noexcept { return static_cast<int>(theta_.cols()); }
  std::uint64_t seed() const noexcept { return seed_; }

private:
  Eigen::MatrixXd theta_;
  std::uint64_t seed_ = 0;
};

struct CurvilinearConfig {
  double rho = 1e-4;
  double delta = 0.1;
  double xi = 0.85;
  double epsilon = 1e-8;  ///< stop when the Riemannian gradient |A|_F falls below this
  int max_inner = 200;
  int max_outer = 50;

  void validate() const;
};

/// Per-level summary of a multi-scale run.
struct ScaleReport {
  int dim = 0;
  int directions = 0;
  std::string method;
  int iterations = 0;
  double initial_energy = 0.0;
  double final_energy = 0.0;
  std::optional<double> quality;
};

struct RegistrationResult {
  OrthogonalMatrix rotation;
  TransportPlan plan;
  std::vector<double> energy_trace;  ///< entry 0 is the starting energy
  Correspondence correspondence;
  std::vector<ScaleReport> scale_reports;
};

/// sum_ij sigma_ij |p_i R - q_j|^2
double rwd_energy(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q, const Eigen::MatrixXd& r,
                  const TransportPlan& plan);

/// Proj_O(n)(P^T sigma Q).
OrthogonalMatrix procrustes(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q, const TransportPlan& plan);
OrthogonalMatrix procrustes(const Embedding& p, const Embedding& q, const TransportPlan& plan);

/// Alternates procrustes with exact transport until the energy stalls.
RegistrationResult rwd_register(const Embedding& p, const Embedding& q, const OrthogonalMatrix& init,
                                int max_iter, const ExactOptions& exact = {});

/// rwd_register from every signed permutation (n <= 4), keeping the lowest
/// energy; ties keep the earliest start.
RegistrationResult rwd_register_restarts(const Embedding& p, const Embedding& q, int max_iter,
                                         const ExactOptions& exact = {});

/// sqrt of the minimized energy.
double rwd_distance(const RegistrationResult& result);

struct SlicedValue {
  double value = 0.0;  ///< (1/L) sum_l W_2^2 of the projections
  std::vector<TransportPlan> plans;
};

SlicedValue rswd_eval(const Embedding& p, const Embedding& q, const OrthogonalMatrix& r, const DirectionSet& dirs);
SlicedValue rswd_eval(const Eigen::MatrixXd& p, const Eigen::VectorXd& mu, const Eigen::MatrixXd& q,
                      const Eigen::VectorXd& nu, const Eigen::MatrixXd& r, const Eigen::MatrixXd& theta);

/// E_theta(R) = (1/L) sum_l sum_ij sigma_ij(theta_l) (p_i R theta_l^T - q_j theta_l^T)^2 at frozen plans.
double frozen_energy(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q, const Eigen::MatrixXd& r,
                     const Eigen::MatrixXd& theta, const std::vector<TransportPlan>& plans);

/// Euclidean gradient of frozen_energy with respect to R.
Eigen::MatrixXd gradient(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q, const Eigen::MatrixXd& r,
                         const Eigen::MatrixXd& theta, const std::vector<TransportPlan>& plans);

/// frozen_energy and gradient reduced to n x n matrices, using the marginal
/// identity sigma_l 1 = mu:
///   E(R) = (1/L) [tr(R^T G R S) - 2 tr(R^T B) + c],
///   G = P^T diag(mu) P,  S = Theta^T Theta,  B = sum_l P^T sigma_l Q theta_l^T theta_l.
class FrozenObjective {
public:
  FrozenObjective(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q, const Eigen::MatrixXd& theta,
                  const std::vector<TransportPlan>& plans);

  double energy(const Eigen::MatrixXd& r) const;
  Eigen::MatrixXd gradient(const Eigen::MatrixXd& r) const;

private:
  Eigen::MatrixXd g_;
  Eigen::MatrixXd s_;
  Eigen::MatrixXd b_;
  double c_ = 0.0;
  double inv_l_ = 1.0;
};

/// A = H R^T - R H^T
Eigen::MatrixXd skew(const Eigen::MatrixXd& h, const Eigen::MatrixXd& r);

/// Y(tau) = (I + tau/2 A)^{-1} (I - tau/2 A) R
Eigen::MatrixXd cayley(const Eigen::MatrixXd& r, const Eigen::MatrixXd& a, double tau);

struct SearchStats {
  int iterations = 0;
  int backtracks = 0;
  double final_gradient = 0.0;
};

/// Nonmonotone curvilinear search with Barzilai-Borwein steps on O(n) at
/// frozen plans. Returns the lowest-energy iterate visited.
OrthogonalMatrix curvilinear_search(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q, const Eigen::MatrixXd& theta,
                                    const std::vector<TransportPlan>& plans, const OrthogonalMatrix& r0,
                                    const CurvilinearConfig& config, SearchStats* stats = nullptr);

/// Alternates curvilinear R-steps with per-direction 1-D transport.
RegistrationResult rswd_register_alternating(const Embedding& p, const Embedding& q, const DirectionSet& dirs,
                                             const CurvilinearConfig& config, const OrthogonalMatrix& init);

/// Alternates procrustes on the direction-averaged plan with re-slicing.
/// With `init_plan` the first procrustes step uses it instead of the plans
/// at `init`.
RegistrationResult empirical_register(const Embedding& p, const Embedding& q, const DirectionSet& dirs,
                                      const OrthogonalMatrix& init, int max_iter,
                                      const std::optional<TransportPlan>& init_plan = std::nullopt);

enum class InitStrategy { Identity, Moments };

std::string_view to_string(InitStrategy strategy) noexcept;
std::optional<InitStrategy> parse_init_strategy(std::string_view name);

/// Cold-start rotation from second moments. With C_P = U_P D U_P^T and
/// C_Q = U_Q D' U_Q^T the mu-weighted centered covariances, the candidates
/// are U_P S U_Q^T over diagonal sign matrices S (all 2^n patterns up to
/// n = 10, greedy coordinate flips beyond), ranked by rswd_eval on the first
/// `score_directions` rows of `dirs`.
OrthogonalMatrix moment_initialization(const Embedding& p, const Embedding& q, const DirectionSet& dirs,
                                       int score_directions = 64);

/// Identity or moment_initialization.
OrthogonalMatrix cold_start(const Embedding& p, const Embedding& q, const DirectionSet& dirs, InitStrategy strategy);

enum class RegisterMethod { Alternating, Empirical, Exact };

std::string_view to_string(RegisterMethod method) noexcept;
std::optional<RegisterMethod> parse_register_method(std::string_view name);

struct LevelConfig {
  int directions = 1000;
  int iterations = 2;
  RegisterMethod method = RegisterMethod::Empirical;
};

struct MultiscaleOptions {
  std::vector<LevelConfig> levels;
  std::uint64_t seed = 1;
  InitStrategy init = InitStrategy::Moments;  ///< level 0 only
  CurvilinearConfig curvilinear;
  ExactOptions exact;
  /// When set, each level's correspondence is scored by pushing these
  /// triangles onto `target`.
  const PointCloud* source = nullptr;
  const PointCloud* target = nullptr;
};

/// Direction count used for an n-dimensional level of a multi-scale run.
int default_directions(int n);
/// Direction count for single-scale runs.
int default_directions_single(int n);

/// Coarse-to-fine registration over nested embeddings. Level 0 starts from
/// cold_start; level j starts from sigma_{j-1} and from whichever of
/// diag(R_{j-1}, I) and procrustes(P_j, Q_j, sigma_{j-1}) has the lower
/// sliced energy.
RegistrationResult multiscale_register(const std::vector<Embedding>& p_levels,
                                       const std::vector<Embedding>& q_levels, const MultiscaleOptions& options);

}  // namespace lbreg
