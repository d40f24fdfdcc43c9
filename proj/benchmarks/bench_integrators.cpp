#include <benchmark/benchmark.h>

#include "routhe/experiments.hpp"
#include "routhe/fdms.hpp"
#include "routhe/forms.hpp"
#include "routhe/reduction.hpp"
#include "routhe/reference.hpp"
#include "routhe/symmetry.hpp"
#include "routhe/systems.hpp"

using namespace routhe;

namespace {

ReducedSystem central_reduction(const systems::CentralParams& p) {
  return reduce(systems::central_midpoint(p), translation_symmetry(2, 1), Vec{p.mu}, flat_connection(2, 1));
}

void BM_ReducedCentralRun(benchmark::State& state) {
  const systems::CentralParams cp;
  const ReducedSystem red = central_reduction(cp);
  const auto steps = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run(red.reduced, Vec{0.2}, Vec{0.201}, steps));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ReducedCentralRun)->Arg(100)->Arg(500);

void BM_BarRun(benchmark::State& state) {
  const DiscreteSystem bar = systems::bar(systems::BarParams{1.0, 1.0, 0.2});
  for (auto _ : state) benchmark::DoNotOptimize(run(bar, Vec{0.0, 0.0, 0.0}, Vec{0.1, 0.5, 0.2}, 100));
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_BarRun);

void BM_Rk4Step(benchmark::State& state) {
  const ContinuousReducedSystem s = ContinuousReducedSystem::sextic(0.1, 2.0, 1.0, -0.114);
  const OdeRhs f = [&s](double, const Vec& y) { return s.rhs(y); };
  const Vec y0{0.2, 0.01};
  for (auto _ : state) benchmark::DoNotOptimize(rk4_step(f, 0.0, y0, 0.2));
}
BENCHMARK(BM_Rk4Step);

void BM_AdaptiveOracle(benchmark::State& state) {
  const ContinuousReducedSystem s = ContinuousReducedSystem::sextic(0.1, 2.0, 1.0, -0.114);
  const OdeRhs f = [&s](double, const Vec& y) { return s.rhs(y); };
  for (auto _ : state) benchmark::DoNotOptimize(adaptive_solve(f, Vec{0.2, 0.01}, 0.0, 100.0));
}
BENCHMARK(BM_AdaptiveOracle)->Unit(benchmark::kMillisecond);

void BM_DetectRouth(benchmark::State& state) {
  const DiscreteSystem syn = systems::synthetic_routh_space(0.3, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(detect_routh(syn));
}
BENCHMARK(BM_DetectRouth)->Unit(benchmark::kMillisecond);

void BM_CentralScenario(benchmark::State& state) {
  const ScenarioConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(run_central(cfg));
}
BENCHMARK(BM_CentralScenario)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
