#include <benchmark/benchmark.h>

#include <random>

#include "speedup/cycles.hpp"
#include "speedup/driver.hpp"
#include "support/fixtures.hpp"

namespace speedup {
namespace {

void BM_Kantorovich(benchmark::State& state) {
  const int atoms = static_cast<int>(state.range(0));
  std::mt19937_64 rng(1);
  auto space = std::make_shared<const FiniteMetricSpace>(FiniteMetricSpace::Discrete(atoms));
  std::vector<int64_t> a(atoms), b(atoms);
  for (int i = 0; i < atoms; ++i) {
    a[i] = 1 + static_cast<int64_t>(rng() % 100);
    b[i] = 1 + static_cast<int64_t>(rng() % 100);
  }
  EmpiricalDistribution d1(space, a), d2(space, b);
  for (auto _ : state) benchmark::DoNotOptimize(Kantorovich(d1, d2));
}
BENCHMARK(BM_Kantorovich)->Arg(8)->Arg(32)->Arg(128);

void BM_NameKantorovich(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(2);
  GExtensionSystem t = fixtures::RandomSystem(rng, 2048, 2, 2);
  GExtensionSystem s = fixtures::RandomSystem(rng, 2048, 2, 2);
  NameDistribution dt = SystemBlockDistribution(t, n), ds = SystemBlockDistribution(s, n);
  for (auto _ : state) benchmark::DoNotOptimize(NameKantorovich(dt, ds, t.group));
}
BENCHMARK(BM_NameKantorovich)->Arg(2)->Arg(4)->Arg(8);

void BM_BuildCycles(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0)), w = 64 * p;
  WindowSamples diagonal(w, std::vector<int>(p));
  for (auto& row : diagonal)
    for (int i = 0; i < p; ++i) row[i] = i;
  WindowSystem windows = WindowSystem::Tiled(p, w);
  for (auto _ : state) benchmark::DoNotOptimize(BuildCycles(windows, {diagonal}, p));
}
BENCHMARK(BM_BuildCycles)->Arg(4)->Arg(16);

void BM_Improve(benchmark::State& state) {
  const int N = 2048;
  GExtensionSystem target = fixtures::SingleStepTarget(N, 2);
  auto source = std::make_shared<const GExtensionSystem>(fixtures::SingleStepSource(N, 2));
  ImproveParams params{8, 0.1, 64, 0.05, 0.2, fixtures::ResidueRectangles(N, 1)[0].a1, {0}};
  BootstrapResult boot = BootstrapRegular(source, source->labels, 8, 0.1, 0.2);
  ImproveSchedule schedule = ImproveSchedule::Tuned(params);
  for (auto _ : state)
    benchmark::DoNotOptimize(Improve(target, boot.speedup, source->labels, params, schedule));
}
BENCHMARK(BM_Improve)->Unit(benchmark::kMillisecond)->Iterations(3);

}  // namespace
}  // namespace speedup

// The packaged benchmark_main archive is LTO bytecode from another compiler.
BENCHMARK_MAIN();
