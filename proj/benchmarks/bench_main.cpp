#include <benchmark/benchmark.h>

#include "gaussbp/bp.hpp"
#include "gaussbp/builders.hpp"
#include "gaussbp/cumulants.hpp"
#include "gaussbp/gbp.hpp"
#include "gaussbp/stereo.hpp"

using namespace gaussbp;

namespace {

const Grid kGrid(1024, -32.0, 31.0);

void BM_Convolve(benchmark::State& state) {
  const DiscreteDist d = random_potential({64, 1}, kGrid);
  const Kernel k = random_kernel(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(convolve(d, k));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(kGrid.size()) * state.range(0));
}
BENCHMARK(BM_Convolve)->Arg(3)->Arg(12)->Arg(48);

void BM_Cumulants(benchmark::State& state) {
  const DiscreteDist d = random_potential({256, 3}, kGrid);
  for (auto _ : state) benchmark::DoNotOptimize(cumulants(d));
}
BENCHMARK(BM_Cumulants);

FactorGraph bench_grid(std::size_t side) {
  PriorList priors;
  for (VariableId v = 0; v < side * side; v += 3) priors.emplace_back(v, random_potential({16, v}, kGrid));
  return build_grid_graph(side, side, priors, KernelSpec::random(12, 7), kGrid);
}

void BM_RunSyncGrid(benchmark::State& state) {
  const FactorGraph g = bench_grid(static_cast<std::size_t>(state.range(0)));
  BpOptions opt;
  opt.iterations = 5;
  opt.record_summaries = false;
  for (auto _ : state) benchmark::DoNotOptimize(run_sync(g, opt));
  state.SetItemsProcessed(state.iterations() * 5 * static_cast<std::int64_t>(g.num_edges()));
}
BENCHMARK(BM_RunSyncGrid)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_GbpGrid(benchmark::State& state) {
  const FactorGraph g = bench_grid(static_cast<std::size_t>(state.range(0)));
  GbpOptions opt;
  opt.iterations = 50;
  opt.record_trace = false;
  for (auto _ : state) benchmark::DoNotOptimize(gbp_run_sync(g, opt));
}
BENCHMARK(BM_GbpGrid)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_StereoDesk(benchmark::State& state) {
  const ImagePair pair = synthetic_shift_pair(60, 50, 3, 42);
  StereoConfig cfg;
  cfg.disparity_grid = Grid(9, 0.0, 8.0);
  cfg.iterations = 10;
  const Engine engine = state.range(0) == 0 ? Engine::BP : Engine::GBP;
  for (auto _ : state) benchmark::DoNotOptimize(run_stereo(pair, cfg, engine));
  state.SetLabel(engine_name(engine));
}
BENCHMARK(BM_StereoDesk)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
