#include <algorithm>
#include <cmath>
#include <numeric>

#include "lbreg/error.hpp"
#include "lbreg/register.hpp"

namespace lbreg {

namespace {

void check_pair(const Embedding& p, const Embedding& q) {
  if (p.dim() != q.dim()) {
    throw DimensionMismatch("embedding dimensions differ: " + std::to_string(p.dim()) + " vs " +
                            std::to_string(q.dim()));
  }
  if (p.measure.size() != p.size() || q.measure.size() != q.size()) {
    throw DimensionMismatch("embedding measure does not match its point count");
  }
}

std::vector<Eigen::MatrixXd> signed_permutations(int n) {
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<Eigen::MatrixXd> out;
  do {
    for (int signs = 0; signs < (1 << n); ++signs) {
      Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n, n);
      for (int k = 0; k < n; ++k) r(k, perm[static_cast<std::size_t>(k)]) = (signs >> k) & 1 ? -1.0 : 1.0;
      out.push_back(std::move(r));
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

}  // namespace

RegistrationResult rwd_register(const Embedding& p, const Embedding& q, const OrthogonalMatrix& init, int max_iter,
                                const ExactOptions& exact) {
  check_pair(p, q);
  if (init.dim() != p.dim()) throw DimensionMismatch("initial rotation does not match the embedding dimension");
  if (static_cast<double>(p.size()) * static_cast<double>(q.size()) > static_cast<double>(exact.size_limit)) {
    throw SizeLimitExceeded("exact registration of " + std::to_string(p.size()) + " x " + std::to_string(q.size()) +
                            " points exceeds the limit of " + std::to_string(exact.size_limit) + " cells");
  }

  OrthogonalMatrix r = init;
  auto step = ot_exact(squared_distances(p.coords * r.matrix(), q.coords), p.measure, q.measure, exact);
  RegistrationResult res;
  res.energy_trace.push_back(step.cost);
  for (int k = 0; k < max_iter && step.cost > 0.0; ++k) {
    OrthogonalMatrix rn = procrustes(p, q, step.plan);
    auto next = ot_exact(squared_distances(p.coords * rn.matrix(), q.coords), p.measure, q.measure, exact);
    // The alternation can only lower the energy; a rise is rounding at the
    // fixed point, so keep the previous state.
    if (next.cost > step.cost) break;
    const double previous = step.cost;
    r = std::move(rn);
    step = std::move(next);
    res.energy_trace.push_back(step.cost);
    if (previous - step.cost <= 1e-12 * previous) break;
  }
  res.rotation = std::move(r);
  res.correspondence = plan_to_map(step.plan);
  res.plan = std::move(step.plan);
  return res;
}

RegistrationResult rwd_register_restarts(const Embedding& p, const Embedding& q, int max_iter,
                                         const ExactOptions& exact) {
  check_pair(p, q);
  if (p.dim() > 4) throw SizeLimitExceeded("signed-permutation restarts are limited to n <= 4");
  std::optional<RegistrationResult> best;
  for (auto& start : signed_permutations(static_cast<int>(p.dim()))) {
    auto res = rwd_register(p, q, OrthogonalMatrix(std::move(start)), max_iter, exact);
    if (!best || res.energy_trace.back() < best->energy_trace.back()) best = std::move(res);
  }
  return std::move(*best);
}

double rwd_distance(const RegistrationResult& result) {
  return std::sqrt(std::max(0.0, result.energy_trace.back()));
}

}  // namespace lbreg
