#include <benchmark/benchmark.h>

#include "ddt/forest.hpp"
#include "ddt/simulation.hpp"
#include "ddt/stability.hpp"
#include "ddt/stump.hpp"

namespace {

ddt::Dataset sim_sample(std::size_t n, std::uint64_t seed) {
  ddt::Rng rng(seed);
  const auto region = ddt::Region::full(ddt::sim2d_schema());
  ddt::Dataset d;
  d.x = ddt::sample_region(region, n, rng);
  for (std::size_t i = 0; i < n; ++i) d.y.push_back(ddt::sim2d_function(d.x(i, 0), d.x(i, 1)));
  return d;
}

void BM_FitStump(benchmark::State& state) {
  const auto data = sim_sample(static_cast<std::size_t>(state.range(0)), 1);
  const auto region = ddt::Region::full(ddt::sim2d_schema());
  ddt::Rng rng(2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ddt::fit_stump(data, region, ddt::SplitCriterion::sse(), rng));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FitStump)->Arg(300)->Arg(10000);

void BM_ForestPredict(benchmark::State& state) {
  const auto train = sim_sample(50, 3);
  ddt::ForestConfig fc;
  fc.trees = 200;
  const auto fit = ddt::fit_forest_teacher(ddt::sim2d_schema(), train, fc);
  const auto rows = sim_sample(static_cast<std::size_t>(state.range(0)), 4).x;
  for (auto _ : state) benchmark::DoNotOptimize(fit.teacher->evaluate(rows));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ForestPredict)->Arg(10000);

void BM_StabilityRoot(benchmark::State& state) {
  const auto train = sim_sample(50, 5);
  ddt::ForestConfig fc;
  fc.trees = 50;
  const auto fit = ddt::fit_forest_teacher(ddt::sim2d_schema(), train, fc);
  const auto region = ddt::Region::full(ddt::sim2d_schema());
  ddt::StabilityConfig sc;
  sc.repeats = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        ddt::measure_split_stability(*fit.teacher, region, ddt::SplitCriterion::sse(), sc, {7, 1, 1, 0}));
  }
}
BENCHMARK(BM_StabilityRoot)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
