#include <benchmark/benchmark.h>

#include "roughvol/pricing.hpp"
#include "roughvol/rbergomi.hpp"
#include "roughvol/time_grid.hpp"

using namespace roughvol;

namespace {

ModelParams desk_params() {
    ModelParams p;
    p.H = 0.1;
    p.rho = -0.8;
    p.alpha = 0.8;
    return p;
}

MCConfig mc_with(std::uint64_t n_paths) {
    MCConfig mc;
    mc.n_paths = n_paths;
    mc.seed = 2024;
    return mc;
}

}  // namespace

// Path generation dominates wall time; this measures the full simulate-and
// -summarize pass per path.
static void BM_EnsembleBuild(benchmark::State& state) {
    const ModelParams p = desk_params();
    const TimeGrid grid = TimeGrid::make(0.0, 0.5, 1.0, 100);
    const std::uint64_t n = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) {
        const PathEnsemble paths(p, grid, mc_with(n));
        benchmark::DoNotOptimize(paths.forward_vols().data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_EnsembleBuild)->Arg(10000)->Arg(50000)->Unit(benchmark::kMillisecond);

// Repricing strikes on a frozen ensemble is the inner loop of the zero-vanna
// iteration; it should be orders of magnitude cheaper than the build.
static void BM_PriceCall(benchmark::State& state) {
    const ModelParams p = desk_params();
    const TimeGrid grid = TimeGrid::make(0.0, 0.5, 1.0, 100);
    const PathEnsemble paths(p, grid, mc_with(50000));
    double k = -0.05;
    for (auto _ : state) {
        benchmark::DoNotOptimize(paths.price_call(k));
        k = -k;
    }
    state.SetItemsProcessed(state.iterations() * 50000);
}
BENCHMARK(BM_PriceCall);

static void BM_ZeroVannaReport(benchmark::State& state) {
    const ModelParams p = desk_params();
    const TimeGrid grid = TimeGrid::make(0.0, 0.5, 1.0, 100);
    const PathEnsemble paths(p, grid, mc_with(50000));
    for (auto _ : state) benchmark::DoNotOptimize(zero_vanna_report(paths));
}
BENCHMARK(BM_ZeroVannaReport)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
