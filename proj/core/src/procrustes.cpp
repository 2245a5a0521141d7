#include <cmath>
#include <random>

#include <Eigen/SVD>

#include "lbreg/error.hpp"
#include "lbreg/register.hpp"

namespace lbreg {

double orthogonality_error(const Eigen::MatrixXd& r) {
  return (r * r.transpose() - Eigen::MatrixXd::Identity(r.rows(), r.rows())).norm();
}

OrthogonalMatrix::OrthogonalMatrix(Eigen::MatrixXd r, double tol) : r_(std::move(r)) {
  if (r_.rows() != r_.cols()) throw DimensionMismatch("orthogonal matrix must be square");
  if (!r_.allFinite() || orthogonality_error(r_) > tol) {
    throw DegenerateInput("matrix is not orthogonal (|R R^T - I|_F = " + std::to_string(orthogonality_error(r_)) + ")");
  }
}

OrthogonalMatrix OrthogonalMatrix::identity(Eigen::Index n) {
  return OrthogonalMatrix(Eigen::MatrixXd::Identity(n, n));
}

OrthogonalMatrix OrthogonalMatrix::nearest(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return OrthogonalMatrix(svd.matrixU() * svd.matrixV().transpose());
}

OrthogonalMatrix OrthogonalMatrix::embedded(Eigen::Index n) const {
  if (n < dim()) throw DimensionMismatch("cannot embed a rotation into a smaller dimension");
  Eigen::MatrixXd out = Eigen::MatrixXd::Identity(n, n);
  out.topLeftCorner(dim(), dim()) = r_;
  return OrthogonalMatrix(std::move(out));
}

DirectionSet::DirectionSet(int count, int dim, std::uint64_t seed) : seed_(seed) {
  if (count < 1 || dim < 1) throw DegenerateInput("direction set needs count >= 1 and dim >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  theta_.resize(count, dim);
  for (int l = 0; l < count; ++l) {
    double norm = 0.0;
    do {
      for (int k = 0; k < dim; ++k) theta_(l, k) = gauss(rng);
      norm = theta_.row(l).norm();
    } while (!(norm > 1e-12));
    theta_.row(l) /= norm;
  }
}

void CurvilinearConfig::validate() const {
  if (!(rho > 0.0 && rho < 1.0)) throw DegenerateInput("rho must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) throw DegenerateInput("delta must lie in (0, 1)");
  if (!(xi >= 0.0 && xi < 1.0)) throw DegenerateInput("xi must lie in [0, 1)");
  if (!(epsilon > 0.0)) throw DegenerateInput("epsilon must be positive");
  if (max_inner < 1 || max_outer < 1) throw DegenerateInput("iteration caps must be positive");
}

double rwd_energy(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q, const Eigen::MatrixXd& r,
                  const TransportPlan& plan) {
  const Eigen::MatrixXd pr = p * r;
  double e = 0.0;
  for (const auto& c : plan.entries()) e += c.mass * (pr.row(c.row) - q.row(c.col)).squaredNorm();
  return e;
}

OrthogonalMatrix procrustes(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q, const TransportPlan& plan) {
  if (p.cols() != q.cols()) {
    throw DimensionMismatch("embedding dimensions differ: " + std::to_string(p.cols()) + " vs " +
                            std::to_string(q.cols()));
  }
  if (plan.rows() != p.rows() || plan.cols() != q.rows()) throw DimensionMismatch("plan does not match point counts");
  Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(p.rows(), q.cols());  // sigma Q
  for (const auto& e : plan.entries()) sq.row(e.row) += e.mass * q.row(e.col);
  return OrthogonalMatrix::nearest(p.transpose() * sq);
}

OrthogonalMatrix procrustes(const Embedding& p, const Embedding& q, const TransportPlan& plan) {
  return procrustes(p.coords, q.coords, plan);
}

}  // namespace lbreg
