#include <benchmark/benchmark.h>

#include <vector>

#include "roughvol/gaussian_process.hpp"
#include "roughvol/time_grid.hpp"

using namespace roughvol;

namespace {

JointCovariance window_covariance(int steps_per_year, double lead, double window) {
    const TimeGrid grid = TimeGrid::make(0.0, lead, lead + window, steps_per_year);
    std::vector<double> w_times(grid.nodes.begin() + static_cast<long>(grid.forward_index),
                                grid.nodes.end() - 1);
    return assemble_joint_covariance(w_times, w_times, grid.dt, 0.1, -0.8);
}

}  // namespace

static void BM_Factorize(benchmark::State& state) {
    const JointCovariance cov =
        window_covariance(static_cast<int>(state.range(0)), 0.5, 0.5);
    for (auto _ : state) benchmark::DoNotOptimize(factorize(cov));
    state.counters["dim"] = static_cast<double>(cov.dimension());
}
BENCHMARK(BM_Factorize)->Arg(100)->Arg(250);

static void BM_SampleBatch(benchmark::State& state) {
    const JointCovariance cov = window_covariance(100, 0.5, 0.5);
    const PathSampler sampler(cov);
    PathBatch batch;
    std::uint64_t index = 0;
    const Eigen::Index n = state.range(0);
    for (auto _ : state) {
        sampler.sample_into(batch, n, 2024, index++);
        benchmark::DoNotOptimize(batch.wh.data());
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_SampleBatch)->Arg(1024)->Arg(4096);

BENCHMARK_MAIN();
