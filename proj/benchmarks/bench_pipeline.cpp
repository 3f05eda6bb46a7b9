#include <benchmark/benchmark.h>

#include "depad/engine.hpp"
#include "depad/evaluation.hpp"
#include "depad/rng.hpp"
#include "depad/stats.hpp"

using namespace depad;

namespace {

Dataset linear_sem(std::uint64_t seed, std::size_t n, std::size_t m) {
    Rng rng(seed);
    std::vector<std::vector<double>> cols(m, std::vector<double>(n));
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) {
        double prev = rng.normal();
        cols[0][i] = prev;
        for (std::size_t j = 1; j < m; ++j) {
            prev = 0.7 * prev + rng.normal();
            cols[j][i] = prev;
        }
    }
    for (std::size_t j = 0; j < m; ++j) names.push_back("v" + std::to_string(j));
    return Dataset(std::move(cols), std::move(names));
}

} // namespace

static void BM_FitCart(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    const Dataset d = linear_sem(1, n, 4);
    std::vector<ColumnView> X = {d.column(0), d.column(1), d.column(2)};
    const auto& y = d.column(3);
    TreeHyperparams hp;
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit_cart(X, y, hp));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_FitCart)->RangeMultiplier(4)->Range(256, 16384)->Complexity();

static void BM_FitBagged25(benchmark::State& state) {
    const Dataset d = linear_sem(2, static_cast<std::size_t>(state.range(0)), 4);
    std::vector<ColumnView> X = {d.column(0), d.column(1), d.column(2)};
    const auto& y = d.column(3);
    BaggedOptions opts;
    opts.seed = 3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit_bagged(X, y, opts));
    }
}
BENCHMARK(BM_FitBagged25)->Arg(512)->Arg(2048);

static void BM_SelectFbed(benchmark::State& state) {
    const Dataset d = linear_sem(3, 2000, static_cast<std::size_t>(state.range(0)));
    SelectorConfig cfg;
    for (auto _ : state) {
        const CorrelationCache cache(d);
        benchmark::DoNotOptimize(select_fbed(d, cache, 0, cfg));
    }
}
BENCHMARK(BM_SelectFbed)->Arg(8)->Arg(32)->Arg(128);

static void BM_DistanceCorrelation(benchmark::State& state) {
    const Dataset d = linear_sem(4, static_cast<std::size_t>(state.range(0)), 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(distance_correlation(d, 0, 1));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_DistanceCorrelation)->RangeMultiplier(2)->Range(128, 2048)->Complexity();

static void BM_FullPipeline(benchmark::State& state) {
    const Dataset d = linear_sem(5, static_cast<std::size_t>(state.range(0)), 8);
    PipelineConfig cfg;
    cfg.seed = 6;
    for (auto _ : state) {
        benchmark::DoNotOptimize(run(d, cfg));
    }
}
BENCHMARK(BM_FullPipeline)->Arg(256)->Arg(1024);

static void BM_Lof(benchmark::State& state) {
    const Dataset d = linear_sem(7, static_cast<std::size_t>(state.range(0)), 6);
    for (auto _ : state) {
        benchmark::DoNotOptimize(baseline_score(d, {BaselineMethod::LOF, 10}));
    }
}
BENCHMARK(BM_Lof)->Arg(256)->Arg(1024);

BENCHMARK_MAIN();
