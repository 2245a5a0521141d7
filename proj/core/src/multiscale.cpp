#include <algorithm>
#include <array>
#include <utility>

#include "lbreg/error.hpp"
#include "lbreg/register.hpp"

namespace lbreg {

std::string_view to_string(RegisterMethod method) noexcept {
  switch (method) {
    case RegisterMethod::Alternating: return "alternating";
    case RegisterMethod::Empirical: return "empirical";
    case RegisterMethod::Exact: return "exact";
  }
  return "unknown";
}

std::optional<RegisterMethod> parse_register_method(std::string_view name) {
  if (name == "alternating" || name == "alternating_rswd") return RegisterMethod::Alternating;
  if (name == "empirical") return RegisterMethod::Empirical;
  if (name == "exact") return RegisterMethod::Exact;
  return std::nullopt;
}

int default_directions(int n) {
  static constexpr std::array<std::pair<int, int>, 9> ladder{
      {{5, 500}, {10, 800}, {20, 1000}, {30, 1500}, {50, 3000}, {80, 6000}, {120, 10000}, {150, 15000}, {200, 20000}}};
  for (const auto& [dim, count] : ladder) {
    if (n <= dim) return count;
  }
  return ladder.back().second;
}

int default_directions_single(int n) {
  static constexpr std::array<std::pair<int, int>, 5> table{
      {{5, 1000}, {10, 1500}, {20, 2000}, {30, 3000}, {50, 5000}}};
  for (const auto& [dim, count] : table) {
    if (n <= dim) return count;
  }
  return table.back().second;
}

RegistrationResult multiscale_register(const std::vector<Embedding>& p_levels,
                                       const std::vector<Embedding>& q_levels, const MultiscaleOptions& options) {
  if (p_levels.empty() || p_levels.size() != q_levels.size()) {
    throw DegenerateInput("source and target need the same, nonzero number of levels");
  }
  if (options.levels.size() != p_levels.size()) throw DegenerateInput("one level config is required per level");
  for (std::size_t j = 0; j < p_levels.size(); ++j) {
    if (p_levels[j].dim() != q_levels[j].dim()) {
      throw DegenerateInput("level " + std::to_string(j) + " dimensions differ: " +
                            std::to_string(p_levels[j].dim()) + " vs " + std::to_string(q_levels[j].dim()));
    }
    if (j > 0 && p_levels[j].dim() <= p_levels[j - 1].dim()) {
      throw DegenerateInput("level dimensions must increase strictly");
    }
    if (p_levels[j].size() != p_levels[0].size() || q_levels[j].size() != q_levels[0].size()) {
      throw DegenerateInput("levels must share their point sets");
    }
  }

  RegistrationResult out;
  std::optional<OrthogonalMatrix> r;
  std::optional<TransportPlan> sigma;
  for (std::size_t j = 0; j < p_levels.size(); ++j) {
    const auto& p = p_levels[j];
    const auto& q = q_levels[j];
    const auto& cfg = options.levels[j];
    const std::uint64_t seed = options.seed + 1000003ULL * j;
    OrthogonalMatrix init = OrthogonalMatrix::identity(p.dim());
    if (r) {
      // diag(R_{j-1}, I) leaves the new coordinates' signs to chance; the
      // rotation implied by sigma_{j-1} usually fixes them. Keep the better.
      init = r->embedded(p.dim());
      OrthogonalMatrix from_plan = procrustes(p, q, *sigma);
      const DirectionSet scoring(std::max(cfg.directions, 64), static_cast<int>(p.dim()), seed);
      if (rswd_eval(p, q, from_plan, scoring).value < rswd_eval(p, q, init, scoring).value) {
        init = std::move(from_plan);
      }
    } else if (options.init == InitStrategy::Moments) {
      const DirectionSet scoring(std::max(cfg.directions, 64), static_cast<int>(p.dim()), seed);
      init = moment_initialization(p, q, scoring);
    }

    RegistrationResult level;
    int directions = 0;
    switch (cfg.method) {
      case RegisterMethod::Empirical: {
        const DirectionSet dirs(cfg.directions, static_cast<int>(p.dim()), seed);
        directions = cfg.directions;
        level = empirical_register(p, q, dirs, init, cfg.iterations, sigma);
        break;
      }
      case RegisterMethod::Alternating: {
        const DirectionSet dirs(cfg.directions, static_cast<int>(p.dim()), seed);
        directions = cfg.directions;
        CurvilinearConfig curv = options.curvilinear;
        curv.max_outer = cfg.iterations;
        level = rswd_register_alternating(p, q, dirs, curv, init);
        break;
      }
      case RegisterMethod::Exact:
        level = rwd_register(p, q, init, cfg.iterations, options.exact);
        break;
    }

    ScaleReport report;
    report.dim = static_cast<int>(p.dim());
    report.directions = directions;
    report.method = std::string(to_string(cfg.method));
    report.iterations = static_cast<int>(level.energy_trace.size()) - 1;
    report.initial_energy = level.energy_trace.front();
    report.final_energy = level.energy_trace.back();
    if (options.source && options.target) {
      report.quality = transfer_connectivity(*options.source, *options.target, level.correspondence).quality;
    }
    out.scale_reports.push_back(std::move(report));
    out.energy_trace.insert(out.energy_trace.end(), level.energy_trace.begin(), level.energy_trace.end());

    r = std::move(level.rotation);
    sigma = std::move(level.plan);
    out.correspondence = std::move(level.correspondence);
  }
  out.rotation = std::move(*r);
  out.plan = std::move(*sigma);
  return out;
}

}  // namespace lbreg
