#include <algorithm>
#include <cmath>
#include <numeric>

#include "lbreg/error.hpp"
#include "lbreg/transport.hpp"

namespace lbreg {

namespace {

std::vector<int> sorted_order(std::span<const double> v) {
  std::vector<int> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return v[static_cast<std::size_t>(a)] < v[static_cast<std::size_t>(b)]; });
  return idx;
}

void require_finite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) throw DegenerateInput(std::string(what) + " contains a non-finite value");
  }
}

}  // namespace

TransportResult ot_1d(std::span<const double> x, std::span<const double> mu, std::span<const double> y,
                      std::span<const double> nu) {
  if (x.size() != mu.size()) throw DimensionMismatch("ot_1d: x and mu differ in length");
  if (y.size() != nu.size()) throw DimensionMismatch("ot_1d: y and nu differ in length");
  require_probability(mu, "source weights");
  require_probability(nu, "target weights");
  require_finite(x, "source positions");
  require_finite(y, "target positions");

  const auto px = sorted_order(x);
  const auto py = sorted_order(y);
  const std::size_t m = x.size();
  const std::size_t n = y.size();

  // Merge the prefix sums s_i, h_j; each step closes the interval that ends
  // first, so the support is a monotone staircase of at most m + n - 1 cells.
  std::vector<PlanEntry> entries;
  entries.reserve(m + n - 1);
  double cost = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  double s_prev = 0.0;
  double h_prev = 0.0;
  double s = mu[static_cast<std::size_t>(px[0])];
  double h = nu[static_cast<std::size_t>(py[0])];
  while (i < m && j < n) {
    const int r = px[i];
    const int c = py[j];
    const double mass = std::min(s, h) - std::max(s_prev, h_prev);
    if (mass > 0.0) {
      entries.push_back({r, c, mass});
      const double d = x[static_cast<std::size_t>(r)] - y[static_cast<std::size_t>(c)];
      cost += mass * d * d;
    }
    const bool step_i = s <= h;
    const bool step_j = h <= s;
    if (step_i) {
      ++i;
      s_prev = s;
      if (i < m) s += mu[static_cast<std::size_t>(px[i])];
    }
    if (step_j) {
      ++j;
      h_prev = h;
      if (j < n) h += nu[static_cast<std::size_t>(py[j])];
    }
  }
  // Any rounding leftover (weights sum to 1 only within 1e-12) is dropped.

  Eigen::VectorXd mu_v = Eigen::Map<const Eigen::VectorXd>(mu.data(), static_cast<Eigen::Index>(m));
  Eigen::VectorXd nu_v = Eigen::Map<const Eigen::VectorXd>(nu.data(), static_cast<Eigen::Index>(n));
  return {TransportPlan(std::move(entries), std::move(mu_v), std::move(nu_v)), cost};
}

TransportResult ot_1d(const Eigen::VectorXd& x, const Eigen::VectorXd& mu, const Eigen::VectorXd& y,
                      const Eigen::VectorXd& nu) {
  return ot_1d(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())),
               std::span<const double>(mu.data(), static_cast<std::size_t>(mu.size())),
               std::span<const double>(y.data(), static_cast<std::size_t>(y.size())),
               std::span<const double>(nu.data(), static_cast<std::size_t>(nu.size())));
}

}  // namespace lbreg
