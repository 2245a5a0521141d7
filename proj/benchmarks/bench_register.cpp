#include <random>

#include <benchmark/benchmark.h>

#include "lbreg/register.hpp"

namespace {

lbreg::Embedding cloud(int l, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  lbreg::Embedding e;
  e.coords.resize(l, n);
  for (Eigen::Index i = 0; i < e.coords.size(); ++i) e.coords.data()[i] = g(rng);
  e.measure = Eigen::VectorXd::Constant(l, 1.0 / l);
  return e;
}

// args: points, dimension, directions
void BM_rswd_eval(benchmark::State& state) {
  const int l = static_cast<int>(state.range(0)), n = static_cast<int>(state.range(1));
  const auto p = cloud(l, n, 1), q = cloud(l, n, 2);
  const lbreg::DirectionSet dirs(static_cast<int>(state.range(2)), n, 3);
  const auto r = lbreg::OrthogonalMatrix::identity(n);
  for (auto _ : state) benchmark::DoNotOptimize(lbreg::rswd_eval(p, q, r, dirs).value);
}
BENCHMARK(BM_rswd_eval)->Args({500, 5, 1000})->Args({2000, 10, 1500})->Unit(benchmark::kMillisecond);

void BM_empirical_step(benchmark::State& state) {
  const int l = static_cast<int>(state.range(0)), n = static_cast<int>(state.range(1));
  const auto p = cloud(l, n, 4), q = cloud(l, n, 5);
  const lbreg::DirectionSet dirs(static_cast<int>(state.range(2)), n, 6);
  const auto r = lbreg::OrthogonalMatrix::identity(n);
  for (auto _ : state) benchmark::DoNotOptimize(lbreg::empirical_register(p, q, dirs, r, 1).energy_trace.back());
}
BENCHMARK(BM_empirical_step)->Args({500, 5, 1000})->Args({500, 20, 1000})->Unit(benchmark::kMillisecond);

void BM_curvilinear_search(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto p = cloud(500, n, 7), q = cloud(500, n, 8);
  const lbreg::DirectionSet dirs(1000, n, 9);
  const auto r = lbreg::OrthogonalMatrix::identity(n);
  const auto plans = lbreg::rswd_eval(p, q, r, dirs).plans;
  for (auto _ : state) {
    benchmark::DoNotOptimize(lbreg::curvilinear_search(p.coords, q.coords, dirs.directions(), plans, r, {}));
  }
}
BENCHMARK(BM_curvilinear_search)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace
