// Transportation simplex.
//
// The basis is a spanning tree on the bipartite graph rows + cols with
// m + n - 1 cells. Potentials u, v follow from u_r + v_c = c_rc on basic cells;
// an entering cell closes a unique cycle with the tree path between its row
// and column, along which flow is shifted (stepping stone). Pricing is
// Dantzig's most-negative rule; after a run of degenerate pivots it switches
// to Bland's lowest-index rule, which cannot cycle, until flow moves again.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lbreg/error.hpp"
#include "lbreg/transport.hpp"

namespace lbreg {

namespace {

constexpr int kDegenerateRun = 50;

struct Basis {
  int m = 0;
  int n = 0;
  std::vector<int> row;
  std::vector<int> col;
  std::vector<double> flow;
  std::vector<std::vector<int>> adj;  // node -> incident basic cells; cols offset by m
  std::vector<char> is_basic;         // m * n

  int node_of_col(int c) const { return m + c; }

  void add(int b, int r, int c, double f) {
    row[static_cast<std::size_t>(b)] = r;
    col[static_cast<std::size_t>(b)] = c;
    flow[static_cast<std::size_t>(b)] = f;
    adj[static_cast<std::size_t>(r)].push_back(b);
    adj[static_cast<std::size_t>(node_of_col(c))].push_back(b);
    is_basic[static_cast<std::size_t>(r) * static_cast<std::size_t>(n) + static_cast<std::size_t>(c)] = 1;
  }

  void remove(int b) {
    auto drop = [b](std::vector<int>& v) { v.erase(std::find(v.begin(), v.end(), b)); };
    const int r = row[static_cast<std::size_t>(b)];
    const int c = col[static_cast<std::size_t>(b)];
    drop(adj[static_cast<std::size_t>(r)]);
    drop(adj[static_cast<std::size_t>(node_of_col(c))]);
    is_basic[static_cast<std::size_t>(r) * static_cast<std::size_t>(n) + static_cast<std::size_t>(c)] = 0;
  }

  int other(int b, int node) const {
    const int r = row[static_cast<std::size_t>(b)];
    return node == r ? node_of_col(col[static_cast<std::size_t>(b)]) : r;
  }
};

void potentials(const Basis& basis, const Eigen::MatrixXd& c, Eigen::VectorXd& u, Eigen::VectorXd& v) {
  const int total = basis.m + basis.n;
  std::vector<char> seen(static_cast<std::size_t>(total), 0);
  std::vector<int> queue;
  queue.reserve(static_cast<std::size_t>(total));
  queue.push_back(0);
  seen[0] = 1;
  u[0] = 0.0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const int node = queue[head];
    for (int b : basis.adj[static_cast<std::size_t>(node)]) {
      const int next = basis.other(b, node);
      if (seen[static_cast<std::size_t>(next)]) continue;
      seen[static_cast<std::size_t>(next)] = 1;
      const int r = basis.row[static_cast<std::size_t>(b)];
      const int cc = basis.col[static_cast<std::size_t>(b)];
      if (next >= basis.m) {
        v[cc] = c(r, cc) - u[r];
      } else {
        u[r] = c(r, cc) - v[cc];
      }
      queue.push_back(next);
    }
  }
}

/// Basic cells on the tree path from column node `to` back to row node `from`.
std::vector<int> tree_path(const Basis& basis, int from, int to) {
  const int total = basis.m + basis.n;
  std::vector<int> via(static_cast<std::size_t>(total), -2);
  std::vector<int> queue{from};
  via[static_cast<std::size_t>(from)] = -1;
  for (std::size_t head = 0; head < queue.size() && via[static_cast<std::size_t>(to)] == -2; ++head) {
    const int node = queue[head];
    for (int b : basis.adj[static_cast<std::size_t>(node)]) {
      const int next = basis.other(b, node);
      if (via[static_cast<std::size_t>(next)] != -2) continue;
      via[static_cast<std::size_t>(next)] = b;
      queue.push_back(next);
    }
  }
  std::vector<int> path;
  for (int node = to; node != from;) {
    const int b = via[static_cast<std::size_t>(node)];
    path.push_back(b);
    node = basis.other(b, node);
  }
  return path;
}

}  // namespace

TransportResult ot_exact(const Eigen::MatrixXd& costs, const Eigen::VectorXd& mu, const Eigen::VectorXd& nu,
                         const ExactOptions& options) {
  const Eigen::Index m = mu.size();
  const Eigen::Index n = nu.size();
  if (costs.rows() != m || costs.cols() != n) {
    throw DimensionMismatch("cost matrix is " + std::to_string(costs.rows()) + " x " + std::to_string(costs.cols()) +
                            ", marginals are " + std::to_string(m) + " and " + std::to_string(n));
  }
  if (static_cast<double>(m) * static_cast<double>(n) > static_cast<double>(options.size_limit)) {
    throw SizeLimitExceeded("exact transport of " + std::to_string(m) + " x " + std::to_string(n) +
                            " exceeds the limit of " + std::to_string(options.size_limit) + " cells");
  }
  require_probability(std::span<const double>(mu.data(), static_cast<std::size_t>(m)), "source weights");
  require_probability(std::span<const double>(nu.data(), static_cast<std::size_t>(n)), "target weights");
  if (!costs.allFinite()) throw DegenerateInput("cost matrix contains non-finite values");

  Basis basis;
  basis.m = static_cast<int>(m);
  basis.n = static_cast<int>(n);
  const auto cells = static_cast<std::size_t>(m + n - 1);
  basis.row.resize(cells);
  basis.col.resize(cells);
  basis.flow.resize(cells);
  basis.adj.resize(static_cast<std::size_t>(m + n));
  basis.is_basic.assign(static_cast<std::size_t>(m * n), 0);

  // Northwest corner: advance exactly one index per cell so the basis is a
  // spanning tree even when supply and demand are exhausted together.
  {
    Eigen::VectorXd supply = mu;
    Eigen::VectorXd demand = nu;
    int r = 0;
    int c = 0;
    for (std::size_t b = 0; b < cells; ++b) {
      const double f = std::min(supply[r], demand[c]);
      basis.add(static_cast<int>(b), r, c, f);
      supply[r] -= f;
      demand[c] -= f;
      if (r == m - 1) {
        ++c;
      } else if (c == n - 1) {
        ++r;
      } else if (supply[r] <= demand[c]) {
        ++r;
      } else {
        ++c;
      }
    }
  }

  const double scale = std::max(costs.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  const double tol = 1e-12 * scale;
  const std::size_t cap = options.max_pivots != 0
                              ? options.max_pivots
                              : std::max<std::size_t>(10000, 50 * static_cast<std::size_t>(m + n) *
                                                                  static_cast<std::size_t>(std::max(m, n)));

  Eigen::VectorXd u(m);
  Eigen::VectorXd v(n);
  int degenerate_run = 0;
  for (std::size_t pivot = 0;; ++pivot) {
    if (pivot >= cap) {
      throw ConvergenceFailure("transportation simplex exceeded " + std::to_string(cap) + " pivots");
    }
    potentials(basis, costs, u, v);

    const bool bland = degenerate_run >= kDegenerateRun;
    int er = -1;
    int ec = -1;
    double best = -tol;
    for (Eigen::Index r = 0; r < m && !(bland && er >= 0); ++r) {
      for (Eigen::Index c = 0; c < n; ++c) {
        if (basis.is_basic[static_cast<std::size_t>(r * n + c)]) continue;
        const double d = costs(r, c) - u[r] - v[c];
        if (d < best) {
          er = static_cast<int>(r);
          ec = static_cast<int>(c);
          if (bland) break;
          best = d;
        }
      }
    }
    if (er < 0) break;

    // Cycle: entering cell (+), then alternating -, +, ... along the path
    // from its column back to its row.
    const auto path = tree_path(basis, er, basis.node_of_col(ec));
    double theta = std::numeric_limits<double>::infinity();
    int leave = -1;
    long leave_key = std::numeric_limits<long>::max();
    for (std::size_t k = 0; k < path.size(); k += 2) {
      const int b = path[k];
      const double f = basis.flow[static_cast<std::size_t>(b)];
      const long key = static_cast<long>(basis.row[static_cast<std::size_t>(b)]) * n + basis.col[static_cast<std::size_t>(b)];
      if (f < theta || (f == theta && key < leave_key)) {
        theta = f;
        leave = b;
        leave_key = key;
      }
    }
    for (std::size_t k = 0; k < path.size(); ++k) {
      auto& f = basis.flow[static_cast<std::size_t>(path[k])];
      f = (k % 2 == 0) ? f - theta : f + theta;
    }
    basis.remove(leave);
    basis.add(leave, er, ec, theta);
    degenerate_run = theta > 0.0 ? 0 : degenerate_run + 1;
  }

  std::vector<PlanEntry> entries;
  entries.reserve(cells);
  double cost = 0.0;
  for (std::size_t b = 0; b < cells; ++b) {
    const double f = basis.flow[b];
    if (f > 0.0) {
      entries.push_back({basis.row[b], basis.col[b], f});
      cost += f * costs(basis.row[b], basis.col[b]);
    }
  }
  return {TransportPlan(std::move(entries), mu, nu), cost};
}

}  // namespace lbreg
