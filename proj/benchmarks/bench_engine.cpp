#include <benchmark/benchmark.h>

#include "fragsim/oracle.hpp"
#include "fragsim/stats.hpp"

using namespace fragsim;

namespace {

void BM_EngineStep(benchmark::State& state) {
    RunConfig cfg;
    cfg.alpha = static_cast<double>(state.range(0)) / 1000.0;
    cfg.algorithm = static_cast<Algorithm>(state.range(1));
    cfg.seed = 99;
    Engine eng(cfg);
    for (int k = 0; k < 20'000; ++k) eng.step(); // reach steady state
    for (auto _ : state) {
        benchmark::DoNotOptimize(eng.step());
    }
    state.SetItemsProcessed(state.iterations());
}

void BM_PlanAndCarve(benchmark::State& state) {
    RunConfig cfg;
    cfg.alpha = 0.05;
    cfg.seed = 3;
    Engine eng(cfg);
    for (int k = 0; k < 20'000; ++k) eng.step();
    SpectrumState sp = eng.spectrum();
    const double size = sp.total_gap_size() * 0.5;
    for (auto _ : state) {
        SpectrumState copy = sp;
        const GapPlan plan = plan_largest_first(copy, size);
        copy.carve(plan, 1'000'000, size);
        benchmark::DoNotOptimize(copy.gap_count());
    }
}

void BM_OracleExact(benchmark::State& state) {
    const double alpha = static_cast<double>(state.range(0)) / 1000.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(expected_r(alpha));
    }
}

} // namespace

BENCHMARK(BM_EngineStep)
    ->Args({50, 0})
    ->Args({50, 2})
    ->Args({100, 0})
    ->Args({100, 1})
    ->Args({300, 0})
    ->ArgNames({"alpha_milli", "alg"});
BENCHMARK(BM_PlanAndCarve);
BENCHMARK(BM_OracleExact)->Arg(1000)->Arg(250)->Arg(50)->ArgName("alpha_milli");

BENCHMARK_MAIN();
