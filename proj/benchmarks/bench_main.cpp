#include <benchmark/benchmark.h>

#include <array>

#include "redzone/analysis.hpp"
#include "redzone/hazards.hpp"
#include "redzone/montecarlo.hpp"
#include "redzone/system.hpp"

using namespace redzone;

static void BM_BathtubHazard(benchmark::State& state) {
    const BathtubModel m = default_bathtub();
    double t = 0.5;
    for (auto _ : state) {
        benchmark::DoNotOptimize(m.hazard(t));
        t = t > 400.0 ? 0.5 : t + 0.37;
    }
}
BENCHMARK(BM_BathtubHazard);

static void BM_ComposeParallel(benchmark::State& state) {
    const std::array<UnitRisk, 2> r{{{0.01, 1.3}, {0.02, 0.4}}};
    for (auto _ : state) benchmark::DoNotOptimize(compose_parallel(r));
}
BENCHMARK(BM_ComposeParallel);

static void BM_Replication(benchmark::State& state) {
    const auto cfg = default_system_config();
    const Policy pol = state.range(0) == 1 ? Policy::type1() : Policy::type2(220.0 / 6.0);
    SimConfig sim;
    std::uint64_t i = 0;
    for (auto _ : state) benchmark::DoNotOptimize(run_replication(cfg, pol, derive_seed(1, i++), sim));
}
BENCHMARK(BM_Replication)->Arg(1)->Arg(2);

static void BM_Ensemble(benchmark::State& state) {
    const auto cfg = default_system_config();
    SimConfig sim;
    sim.replications = static_cast<std::size_t>(state.range(0));
    sim.threads = 1;
    for (auto _ : state) benchmark::DoNotOptimize(run_ensemble(cfg, Policy::type1(), sim));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Ensemble)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_ScenarioCurve(benchmark::State& state) {
    const auto cfg = default_system_config();
    for (auto _ : state) benchmark::DoNotOptimize(analyze_scenario(cfg, 4.0, 0.1));
}
BENCHMARK(BM_ScenarioCurve)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
