#include <algorithm>
#include <cmath>
#include <numeric>

#include "lbreg/error.hpp"
#include "lbreg/transport.hpp"

namespace lbreg {

namespace {

/// Sorts by (row, col) and sums duplicates; bucket by row first so large
/// averaged plans stay cheap.
std::vector<PlanEntry> canonicalize(std::vector<PlanEntry> in, Eigen::Index rows) {
  std::vector<std::size_t> start(static_cast<std::size_t>(rows) + 1, 0);
  for (const auto& e : in) ++start[static_cast<std::size_t>(e.row) + 1];
  std::partial_sum(start.begin(), start.end(), start.begin());
  std::vector<PlanEntry> bucketed(in.size());
  std::vector<std::size_t> fill(start.begin(), start.end() - 1);
  for (const auto& e : in) bucketed[fill[static_cast<std::size_t>(e.row)]++] = e;

  std::vector<PlanEntry> out;
  out.reserve(in.size());
  for (std::size_t r = 0; r + 1 < start.size(); ++r) {
    auto first = bucketed.begin() + static_cast<std::ptrdiff_t>(start[r]);
    auto last = bucketed.begin() + static_cast<std::ptrdiff_t>(start[r + 1]);
    std::stable_sort(first, last, [](const PlanEntry& a, const PlanEntry& b) { return a.col < b.col; });
    for (auto it = first; it != last; ++it) {
      if (!out.empty() && out.back().row == it->row && out.back().col == it->col) {
        out.back().mass += it->mass;
      } else {
        out.push_back(*it);
      }
    }
  }
  return out;
}

}  // namespace

void require_probability(std::span<const double> w, const char* what, double tol) {
  if (w.empty()) throw DegenerateInput(std::string(what) + " is empty");
  double sum = 0.0;
  for (double v : w) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DegenerateInput(std::string(what) + " has a non-positive weight");
    sum += v;
  }
  if (std::abs(sum - 1.0) > tol) throw DegenerateInput(std::string(what) + " does not sum to 1");
}

TransportPlan::TransportPlan(std::vector<PlanEntry> entries, Eigen::VectorXd row_marginal,
                             Eigen::VectorXd col_marginal, double marginal_tol)
    : mu_(std::move(row_marginal)), nu_(std::move(col_marginal)) {
  for (const auto& e : entries) {
    if (e.row < 0 || e.row >= mu_.size() || e.col < 0 || e.col >= nu_.size()) {
      throw DimensionMismatch("plan entry (" + std::to_string(e.row) + ", " + std::to_string(e.col) +
                              ") outside " + std::to_string(mu_.size()) + " x " + std::to_string(nu_.size()));
    }
    if (!(e.mass >= 0.0) || !std::isfinite(e.mass)) throw DegenerateInput("plan entry has negative mass");
  }
  entries_ = canonicalize(std::move(entries), mu_.size());
  if (marginal_error() > marginal_tol) {
    throw DegenerateInput("plan marginals deviate from the prescribed measures");
  }
}

TransportPlan TransportPlan::diagonal(const Eigen::VectorXd& mu) {
  std::vector<PlanEntry> e;
  e.reserve(static_cast<std::size_t>(mu.size()));
  for (Eigen::Index i = 0; i < mu.size(); ++i) e.push_back({static_cast<int>(i), static_cast<int>(i), mu[i]});
  return TransportPlan(std::move(e), mu, mu);
}

TransportPlan TransportPlan::product(const Eigen::VectorXd& mu, const Eigen::VectorXd& nu) {
  std::vector<PlanEntry> e;
  e.reserve(static_cast<std::size_t>(mu.size() * nu.size()));
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    for (Eigen::Index j = 0; j < nu.size(); ++j) {
      e.push_back({static_cast<int>(i), static_cast<int>(j), mu[i] * nu[j]});
    }
  }
  return TransportPlan(std::move(e), mu, nu);
}

TransportPlan TransportPlan::average(std::span<const TransportPlan> plans) {
  if (plans.empty()) throw DegenerateInput("cannot average zero plans");
  const auto& mu = plans.front().row_marginal();
  const auto& nu = plans.front().col_marginal();
  std::size_t total = 0;
  for (const auto& p : plans) {
    if (p.rows() != mu.size() || p.cols() != nu.size()) throw DimensionMismatch("averaged plans differ in shape");
    total += p.nonzeros();
  }
  const double w = 1.0 / static_cast<double>(plans.size());
  std::vector<PlanEntry> all;
  all.reserve(total);
  for (const auto& p : plans) {
    for (const auto& e : p.entries()) all.push_back({e.row, e.col, w * e.mass});
  }
  return TransportPlan(std::move(all), mu, nu);
}

SparseRowMatrix TransportPlan::matrix() const {
  SparseRowMatrix m(rows(), cols());
  m.reserve(static_cast<Eigen::Index>(entries_.size()));
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(entries_.size());
  for (const auto& e : entries_) trips.emplace_back(e.row, e.col, e.mass);
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

Eigen::MatrixXd TransportPlan::dense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(rows(), cols());
  for (const auto& e : entries_) d(e.row, e.col) += e.mass;
  return d;
}

double TransportPlan::marginal_error() const {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(rows());
  Eigen::VectorXd c = Eigen::VectorXd::Zero(cols());
  for (const auto& e : entries_) {
    r[e.row] += e.mass;
    c[e.col] += e.mass;
  }
  return std::max((r - mu_).cwiseAbs().maxCoeff(), (c - nu_).cwiseAbs().maxCoeff());
}

Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.cols() != b.cols()) throw DimensionMismatch("point dimensions differ");
  Eigen::MatrixXd d(a.rows(), b.rows());
  for (Eigen::Index j = 0; j < b.rows(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) d(i, j) = (a.row(i) - b.row(j)).squaredNorm();
  }
  return d;
}

Correspondence plan_to_map(const TransportPlan& plan) {
  const auto& mu = plan.row_marginal();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(plan.nonzeros());
  for (const auto& e : plan.entries()) trips.emplace_back(e.row, e.col, e.mass / mu[e.row]);
  SparseRowMatrix pi(plan.rows(), plan.cols());
  pi.setFromTriplets(trips.begin(), trips.end());
  return Correspondence(std::move(pi));
}

Eigen::MatrixXd interpolated_image(const TransportPlan& plan, const Eigen::MatrixXd& targets) {
  if (targets.rows() != plan.cols()) {
    throw DimensionMismatch("plan has " + std::to_string(plan.cols()) + " targets, coordinates have " +
                            std::to_string(targets.rows()) + " rows");
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(plan.rows(), targets.cols());
  for (const auto& e : plan.entries()) out.row(e.row) += e.mass * targets.row(e.col);
  return plan.row_marginal().cwiseInverse().asDiagonal() * out;
}

bool is_monotone(const TransportPlan& plan, std::span<const double> x, std::span<const double> y) {
  std::vector<std::pair<double, double>> cells;
  cells.reserve(plan.nonzeros());
  for (const auto& e : plan.entries()) {
    if (e.mass > 0.0) cells.emplace_back(x[static_cast<std::size_t>(e.row)], y[static_cast<std::size_t>(e.col)]);
  }
  std::sort(cells.begin(), cells.end());
  double max_before = -std::numeric_limits<double>::infinity();  // max y over strictly smaller x
  double group_max = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (k > 0 && cells[k].first > cells[k - 1].first) {
      max_before = std::max(max_before, group_max);
      group_max = -std::numeric_limits<double>::infinity();
    }
    if (cells[k].second < max_before) return false;
    group_max = std::max(group_max, cells[k].second);
  }
  return true;
}

}  // namespace lbreg
