// Serial reference against the OpenMP kernels. Argument 0 selects serial, 1 parallel.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "expfunc/density.hpp"
#include "expfunc/kernels.hpp"
#include "expfunc/levy_model.hpp"
#include "expfunc/montecarlo.hpp"

namespace {

using namespace expfunc;

Exec mode(const benchmark::State& state) { return state.range(0) == 0 ? Exec::serial : Exec::parallel; }

void BM_EvaluatePoints(benchmark::State& state) {
    const RealFn f = density_function(gamma_power_example(0.5, 1.0));
    const std::vector<double> xs = log_grid(0.5, 50.0, 512);
    for (auto _ : state) benchmark::DoNotOptimize(evaluate_points(f, xs, mode(state)));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(xs.size()));
}

void BM_LatticeConvolve(benchmark::State& state) {
    std::vector<double> a(8192), b(8192);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = std::exp(-1e-3 * static_cast<double>(i));
        b[i] = 1.0 / (1.0 + 1e-3 * static_cast<double>(i));
    }
    for (auto _ : state) benchmark::DoNotOptimize(lattice_convolve(a, b, 1e-3, mode(state)));
}

void BM_PathPool(benchmark::State& state) {
    const LevyModel model = brownian_drift(1.0);
    PathConfig cfg;
    cfg.exec = mode(state);
    for (auto _ : state) benchmark::DoNotOptimize(sample_exp_functional(model, cfg, 2000).values);
    state.SetItemsProcessed(state.iterations() * 2000);
}

void BM_ParallelGenerate(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(parallel_generate(
            1 << 18, 11,
            [](Xoshiro256& rng, std::size_t) {
                double s = 0.0;
                for (int k = 0; k < 32; ++k) s += rng.uniform();
                return s;
            },
            mode(state)));
}

}  // namespace

BENCHMARK(BM_EvaluatePoints)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_LatticeConvolve)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_PathPool)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ParallelGenerate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
