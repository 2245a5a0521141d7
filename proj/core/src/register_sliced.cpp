#include <cmath>

#include <Eigen/LU>

#include "lbreg/error.hpp"
#include "lbreg/register.hpp"

namespace lbreg {

namespace {

void check_pair(const Eigen::MatrixXd& p, const Eigen::VectorXd& mu, const Eigen::MatrixXd& q,
                const Eigen::VectorXd& nu, const Eigen::MatrixXd& r, const Eigen::MatrixXd& theta) {
  if (p.cols() != q.cols()) {
    throw DimensionMismatch("embedding dimensions differ: " + std::to_string(p.cols()) + " vs " +
                            std::to_string(q.cols()));
  }
  if (mu.size() != p.rows() || nu.size() != q.rows()) throw DimensionMismatch("measure does not match point count");
  if (r.rows() != p.cols() || r.cols() != p.cols()) throw DimensionMismatch("rotation does not match dimension");
  if (theta.cols() != p.cols()) throw DimensionMismatch("directions do not match dimension");
}

void check_plans(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q, const Eigen::MatrixXd& theta,
                 const std::vector<TransportPlan>& plans) {
  if (static_cast<Eigen::Index>(plans.size()) != theta.rows()) {
    throw DimensionMismatch("expected one plan per direction");
  }
  for (const auto& pl : plans) {
    if (pl.rows() != p.rows() || pl.cols() != q.rows()) throw DimensionMismatch("plan does not match point counts");
  }
}

}  // namespace

SlicedValue rswd_eval(const Eigen::MatrixXd& p, const Eigen::VectorXd& mu, const Eigen::MatrixXd& q,
                      const Eigen::VectorXd& nu, const Eigen::MatrixXd& r, const Eigen::MatrixXd& theta) {
  check_pair(p, mu, q, nu, r, theta);
  const Eigen::MatrixXd a = p * r * theta.transpose();
  const Eigen::MatrixXd b = q * theta.transpose();
  SlicedValue out;
  out.plans.reserve(static_cast<std::size_t>(theta.rows()));
  double total = 0.0;
  for (Eigen::Index l = 0; l < theta.rows(); ++l) {
    auto res = ot_1d(a.col(l), mu, b.col(l), nu);
    total += res.cost;
    out.plans.push_back(std::move(res.plan));
  }
  out.value = total / static_cast<double>(theta.rows());
  return out;
}

SlicedValue rswd_eval(const Embedding& p, const Embedding& q, const OrthogonalMatrix& r, const DirectionSet& dirs) {
  return rswd_eval(p.coords, p.measure, q.coords, q.measure, r.matrix(), dirs.directions());
}

double frozen_energy(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q, const Eigen::MatrixXd& r,
                     const Eigen::MatrixXd& theta, const std::vector<TransportPlan>& plans) {
  check_plans(p, q, theta, plans);
  const Eigen::MatrixXd a = p * r * theta.transpose();
  const Eigen::MatrixXd b = q * theta.transpose();
  double total = 0.0;
  for (Eigen::Index l = 0; l < theta.rows(); ++l) {
    double e = 0.0;
    for (const auto& c : plans[static_cast<std::size_t>(l)].entries()) {
      const double d = a(c.row, l) - b(c.col, l);
      e += c.mass * d * d;
    }
    total += e;
  }
  return total / static_cast<double>(theta.rows());
}

Eigen::MatrixXd gradient(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q, const Eigen::MatrixXd& r,
                         const Eigen::MatrixXd& theta, const std::vector<TransportPlan>& plans) {
  check_plans(p, q, theta, plans);
  const Eigen::MatrixXd a = p * r * theta.transpose();
  const Eigen::MatrixXd b = q * theta.transpose();
  // G(i, l) = sum_j sigma_ij(theta_l) (p_i R theta_l^T - q_j theta_l^T)
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(p.rows(), theta.rows());
  for (Eigen::Index l = 0; l < theta.rows(); ++l) {
    for (const auto& c : plans[static_cast<std::size_t>(l)].entries()) {
      g(c.row, l) += c.mass * (a(c.row, l) - b(c.col, l));
    }
  }
  return (2.0 / static_cast<double>(theta.rows())) * (p.transpose() * g * theta);
}

FrozenObjective::FrozenObjective(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q, const Eigen::MatrixXd& theta,
                                 const std::vector<TransportPlan>& plans) {
  check_plans(p, q, theta, plans);
  const Eigen::MatrixXd b = q * theta.transpose();
  const Eigen::VectorXd& mu = plans.front().row_marginal();
  // V(i, l) = sum_j sigma_ij(theta_l) q_j theta_l^T
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(p.rows(), theta.rows());
  double c = 0.0;
  for (Eigen::Index l = 0; l < theta.rows(); ++l) {
    for (const auto& e : plans[static_cast<std::size_t>(l)].entries()) {
      const double qt = b(e.col, l);
      v(e.row, l) += e.mass * qt;
      c += e.mass * qt * qt;
    }
  }
  g_ = p.transpose() * mu.asDiagonal() * p;
  s_ = theta.transpose() * theta;
  b_ = p.transpose() * v * theta;
  c_ = c;
  inv_l_ = 1.0 / static_cast<double>(theta.rows());
}

double FrozenObjective::energy(const Eigen::MatrixXd& r) const {
  const double quad = ((g_ * r * s_).array() * r.array()).sum();
  const double lin = (r.array() * b_.array()).sum();
  return inv_l_ * (quad - 2.0 * lin + c_);
}

Eigen::MatrixXd FrozenObjective::gradient(const Eigen::MatrixXd& r) const {
  return (2.0 * inv_l_) * (g_ * r * s_ - b_);
}

Eigen::MatrixXd skew(const Eigen::MatrixXd& h, const Eigen::MatrixXd& r) {
  const Eigen::MatrixXd hr = h * r.transpose();
  return hr - hr.transpose();
}

Eigen::MatrixXd cayley(const Eigen::MatrixXd& r, const Eigen::MatrixXd& a, double tau) {
  const Eigen::Index n = r.rows();
  const Eigen::MatrixXd half = (0.5 * tau) * a;
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  return (eye + half).partialPivLu().solve((eye - half) * r);
}

RegistrationResult rswd_register_alternating(const Embedding& p, const Embedding& q, const DirectionSet& dirs,
                                             const CurvilinearConfig& config, const OrthogonalMatrix& init) {
  config.validate();
  const auto& theta = dirs.directions();
  OrthogonalMatrix r = init;
  SlicedValue current = rswd_eval(p, q, r, dirs);
  RegistrationResult res;
  res.energy_trace.push_back(current.value);
  for (int k = 0; k < config.max_outer && current.value > 0.0; ++k) {
    OrthogonalMatrix rn = curvilinear_search(p.coords, q.coords, theta, current.plans, r, config);
    SlicedValue next = rswd_eval(p, q, rn, dirs);
    if (next.value > current.value) break;  // rounding at the fixed point
    const double previous = current.value;
    r = std::move(rn);
    current = std::move(next);
    res.energy_trace.push_back(current.value);
    if (previous - current.value <= 1e-10 * previous) break;
  }
  res.rotation = std::move(r);
  res.plan = TransportPlan::average(current.plans);
  res.correspondence = plan_to_map(res.plan);
  return res;
}

RegistrationResult empirical_register(const Embedding& p, const Embedding& q, const DirectionSet& dirs,
                                      const OrthogonalMatrix& init, int max_iter,
                                      const std::optional<TransportPlan>& init_plan) {
  if (max_iter < 0) throw DegenerateInput("iteration cap must be nonnegative");
  OrthogonalMatrix r = init;
  SlicedValue sv = rswd_eval(p, q, r, dirs);
  RegistrationResult res;
  res.energy_trace.push_back(sv.value);
  TransportPlan sigma = init_plan ? *init_plan : TransportPlan::average(sv.plans);
  for (int k = 0; k < max_iter; ++k) {
    r = procrustes(p, q, sigma);
    sv = rswd_eval(p, q, r, dirs);
    sigma = TransportPlan::average(sv.plans);
    const double previous = res.energy_trace.back();
    res.energy_trace.push_back(sv.value);
    if (std::abs(previous - sv.value) <= 1e-10 * previous) break;
  }
  res.rotation = std::move(r);
  res.correspondence = plan_to_map(sigma);
  res.plan = std::move(sigma);
  return res;
}

}  // namespace lbreg
