#include <benchmark/benchmark.h>

#include "optex/impulse.hpp"
#include "optex/montecarlo.hpp"
#include "optex/singular.hpp"

using namespace optex;

namespace {

const ImpactModel kExp = ImpactModel::exponential(0.5);
MarketModel gbm() { return MarketModel::gbm(2.0, 1.0, 4.0); }
MarketModel abm() { return MarketModel::abm(4.0, 0.5, 1.0); }

}  // namespace

static void BM_ImpulseSolveFixedCost(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Grid2D grid(10.0, 10.0, n, n);
    ImpulseProblem prob(gbm(), kExp, 0.2, grid);
    for (auto _ : state) {
        auto sol = solve_impulse(prob);
        benchmark::DoNotOptimize(sol.value.data().data());
    }
    state.SetComplexityN(n);
}
BENCHMARK(BM_ImpulseSolveFixedCost)->Arg(64)->Arg(128)->Arg(256)->Complexity()
    ->Unit(benchmark::kMillisecond);

static void BM_SingularSolveAbm(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Grid2D grid(10.0, 10.0, n, n);
    SingularProblem prob(abm(), kExp, grid);
    for (auto _ : state) {
        auto sol = solve_singular(prob);
        benchmark::DoNotOptimize(sol.value.data().data());
    }
    state.SetComplexityN(n);
}
BENCHMARK(BM_SingularSolveAbm)->Arg(64)->Arg(128)->Arg(256)->Complexity()
    ->Unit(benchmark::kMillisecond);

static void BM_InterventionField(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Grid2D grid(10.0, 10.0, n, n);
    ImpulseProblem prob(gbm(), kExp, 0.2, grid);
    ValueField phi(grid);
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j) phi(i, j) = kExp.liquidation_value(grid.x(i), grid.p(j));
    ValueField out(grid);
    std::vector<double> zeta;
    for (auto _ : state) {
        intervention_field(phi, prob, out, &zeta);
        benchmark::DoNotOptimize(out.data().data());
    }
    state.SetComplexityN(n);
}
BENCHMARK(BM_InterventionField)->Arg(64)->Arg(128)->Arg(256)->Complexity()
    ->Unit(benchmark::kMillisecond);

static void BM_ConstantRatePaths(benchmark::State& state) {
    SimConfig cfg;
    cfg.n_paths = state.range(0);
    cfg.seed = 7;
    for (auto _ : state) {
        auto r = simulate_constant_rate(gbm(), kExp, {5.0, 2.0}, 16.0, cfg);
        benchmark::DoNotOptimize(r.mean);
    }
}
BENCHMARK(BM_ConstantRatePaths)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
