#include <benchmark/benchmark.h>

#include <vector>

#include "roughvol/rng.hpp"

using namespace roughvol;

static void BM_PhiloxBlock(benchmark::State& state) {
    philox4x64::Counter ctr{0, 0, 0, 0};
    const philox4x64::Key key{42, 7};
    for (auto _ : state) {
        ++ctr[0];
        benchmark::DoNotOptimize(philox4x64::generate(ctr, key));
    }
    state.SetItemsProcessed(state.iterations() * 4);  // four words per block
}
BENCHMARK(BM_PhiloxBlock);

static void BM_NormalQuantile(benchmark::State& state) {
    double p = 0.0001;
    for (auto _ : state) {
        benchmark::DoNotOptimize(normal_quantile(p));
        p += 0.0001;
        if (p >= 1.0) p = 0.0001;
    }
}
BENCHMARK(BM_NormalQuantile);

static void BM_NormalStreamFill(benchmark::State& state) {
    std::vector<double> out(static_cast<std::size_t>(state.range(0)));
    std::uint64_t batch = 0;
    for (auto _ : state) {
        NormalStream stream(2024, batch++);
        stream.fill(out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_NormalStreamFill)->Arg(1024)->Arg(65536);

BENCHMARK_MAIN();
