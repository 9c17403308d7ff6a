#include <benchmark/benchmark.h>

#include "midasvol/estimator.hpp"
#include "midasvol/midas.hpp"
#include "midasvol/model.hpp"

using namespace midasvol;

namespace {

ParamSet bench_params() {
    ParamSet p;
    p.mu = 1e-4;
    p.alpha = 0.07;
    p.beta = 0.89;
    p.theta = {0.02};
    p.omega2 = 5.0;
    p.m = 1e-4;
    return p;
}

// A panel sized like two decades of daily data, built once.
const SimulationResult& panel() {
    static SimulationResult sim = simulate(bench_params(), ModelSpec{}, 240, 22, 1);
    return sim;
}

void bm_beta_weights(benchmark::State& state) {
    int K = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(beta_weights(1.0, 5.0, K));
}
BENCHMARK(bm_beta_weights)->Arg(12)->Arg(36)->Arg(264);

void bm_rolling_rv(benchmark::State& state) {
    const auto& sim = panel();
    for (auto _ : state)
        benchmark::DoNotOptimize(realized_vol_rolling(sim.panel.returns, 22));
}
BENCHMARK(bm_rolling_rv);

void bm_nll(benchmark::State& state) {
    const auto& sim = panel();
    ModelEngine eng(sim.panel, ModelSpec{});
    ParamSet p = bench_params();
    for (auto _ : state)
        benchmark::DoNotOptimize(eng.nll(p));
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) *
                            static_cast<int64_t>(eng.n_obs()));
}
BENCHMARK(bm_nll);

void bm_filter(benchmark::State& state) {
    const auto& sim = panel();
    ModelEngine eng(sim.panel, ModelSpec{});
    ParamSet p = bench_params();
    for (auto _ : state)
        benchmark::DoNotOptimize(eng.filter(p));
}
BENCHMARK(bm_filter);

void bm_simulate(benchmark::State& state) {
    ParamSet p = bench_params();
    ModelSpec spec;
    spec.K = 12;
    for (auto _ : state)
        benchmark::DoNotOptimize(simulate(p, spec, 60, 22, 7));
}
BENCHMARK(bm_simulate);

}  // namespace

BENCHMARK_MAIN();
