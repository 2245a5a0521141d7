// Curvilinear search on O(n) at frozen plans.
//
// Each step follows the Cayley curve Y(tau) from the current R. Step lengths
// come from the two Barzilai-Borwein formulas, alternated by iteration
// parity, then shrink by delta until the nonmonotone Armijo test
//   E(Y(tau)) <= C + rho * tau * E'(Y(0)),  E'(Y(0)) = -|A|_F^2 / 2
// holds, where C is the running weighted average of past energies.

#include <algorithm>
#include <cmath>

#include "lbreg/error.hpp"
#include "lbreg/register.hpp"

namespace lbreg {

namespace {

constexpr int kMaxBacktracks = 60;
constexpr double kTauMin = 1e-12;
constexpr double kTauMax = 1e3;

Eigen::MatrixXd retract(Eigen::MatrixXd y) {
  if (orthogonality_error(y) > 1e-13) return OrthogonalMatrix::nearest(y).matrix();
  return y;
}

}  // namespace

OrthogonalMatrix curvilinear_search(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q, const Eigen::MatrixXd& theta,
                                    const std::vector<TransportPlan>& plans, const OrthogonalMatrix& r0,
                                    const CurvilinearConfig& config, SearchStats* stats) {
  config.validate();
  const FrozenObjective objective(p, q, theta, plans);
  auto energy = [&](const Eigen::MatrixXd& r) { return objective.energy(r); };

  Eigen::MatrixXd r = r0.matrix();
  double e = energy(r);
  Eigen::MatrixXd h = objective.gradient(r);
  Eigen::MatrixXd a = skew(h, r);

  Eigen::MatrixXd best_r = r;
  double best_e = e;
  double c = e;
  double qs = 1.0;
  double tau = 1e-2 / (1.0 + h.norm());
  SearchStats local;

  for (int s = 0; s < config.max_inner; ++s) {
    const double grad_norm = a.norm();
    local.final_gradient = grad_norm;
    if (grad_norm <= config.epsilon) break;
    const double slope = -0.5 * grad_norm * grad_norm;

    Eigen::MatrixXd y;
    double ey = 0.0;
    bool accepted = false;
    bool stalled = false;
    double t = tau;
    for (int bt = 0; bt <= kMaxBacktracks; ++bt, t *= config.delta) {
      y = retract(cayley(r, a, t));
      ey = energy(y);
      if (ey <= c + config.rho * t * slope) {
        accepted = true;
        local.backtracks += bt;
        break;
      }
      if (y == r) {
        // The step no longer changes R in floating point.
        stalled = true;
        break;
      }
    }
    if (stalled) break;
    if (!accepted) {
      throw ConvergenceFailure("curvilinear search: no step accepted after " + std::to_string(kMaxBacktracks) +
                               " backtracks");
    }
    ++local.iterations;

    const Eigen::MatrixXd hn = objective.gradient(y);
    const Eigen::MatrixXd an = skew(hn, y);
    const Eigen::MatrixXd d = y - r;
    const Eigen::MatrixXd w = an * y - a * r;
    const double dd = d.squaredNorm();
    const double dw = std::abs((d.array() * w.array()).sum());
    const double ww = w.squaredNorm();
    if (s % 2 == 0) {
      if (dw > 0.0) tau = dd / dw;
    } else {
      if (ww > 0.0) tau = dw / ww;
    }
    tau = std::clamp(tau, kTauMin, kTauMax);

    const double qn = config.xi * qs + 1.0;
    c = (config.xi * qs * c + ey) / qn;
    qs = qn;

    r = y;
    e = ey;
    h = hn;
    a = an;
    if (e < best_e) {
      best_e = e;
      best_r = r;
    }
  }
  local.final_gradient = a.norm();
  if (stats) *stats = local;
  return OrthogonalMatrix(best_r);
}

}  // namespace lbreg
