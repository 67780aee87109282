#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cyclicwave/floquet.hpp"
#include "cyclicwave/pdesim.hpp"
#include "cyclicwave/transform.hpp"

namespace cw = cyclicwave;

static void BM_Monodromy(benchmark::State& state) {
  const auto pot = cw::hill_potential(cw::make_builtin(cw::Builtin::sqrt_sin, 0.5), 3);
  double lambda = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cw::monodromy(pot, lambda));
    lambda = lambda < 59.0 ? lambda + 1.0 : 1.0;
  }
}
BENCHMARK(BM_Monodromy);

static void BM_StabilityScan(benchmark::State& state) {
  const auto pot = cw::hill_potential(cw::make_builtin(cw::Builtin::sqrt_sin, 0.5), 3);
  for (auto _ : state) benchmark::DoNotOptimize(cw::scan_instability(pot, 0.1, 60.0, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_StabilityScan)->Arg(500)->Arg(4000)->Unit(benchmark::kMillisecond);

// one unit of time of the nonlinear torus solver, reported per RK4 step
static void BM_SpectralStep(benchmark::State& state) {
  const auto b = cw::make_builtin(cw::Builtin::sqrt_sin, 0.5);
  const auto f = cw::families::example1(-1.0);
  cw::GridSpec g;
  g.n = 1;
  g.L = 2.0;
  g.points = static_cast<int>(state.range(0));
  g.dt = 0.4 * g.spacing() / b.max_value();
  g.t_end = 100 * g.dt;
  const auto u0 = cw::sample(g, [](const Eigen::VectorXd& x) { return 0.1 * std::cos(std::numbers::pi * x[0]); });
  const cw::Field u1(g.size(), 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(cw::evolve_nonlinear(b, 3, f, g, u0, u1, std::nullopt));
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_SpectralStep)->Arg(256)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

static void BM_TransformEval(benchmark::State& state) {
  const auto tp = cw::build_transform(cw::families::example1(-1.0));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(-100.0, 100.0);
  std::vector<double> xs(1024);
  for (auto& x : xs) x = d(rng);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(tp.G(xs[i++ & 1023]));
}
BENCHMARK(BM_TransformEval);

static void BM_TransformBuild(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(cw::build_transform(cw::families::example1(-1.0)));
}
BENCHMARK(BM_TransformBuild)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
