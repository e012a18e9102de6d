#include <benchmark/benchmark.h>

#include "generators.hpp"
#include "hqmc/equivalence.hpp"
#include "hqmc/model_check.hpp"

namespace {

using namespace hqmc;

/// Similar pairs are equivalent, so the whole reachable span gets explored.
void BM_BlmEquivalentSimilar(benchmark::State& state) {
    testing::Rng rng(7);
    auto const n = static_cast<Eigen::Index>(state.range(0));
    auto const a = testing::random_blm(rng, n, 2);
    auto const b = testing::similar_blm(rng, a);
    for (auto _ : state) {
        benchmark::DoNotOptimize(blm_equivalent(a, b));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BlmEquivalentSimilar)->RangeMultiplier(2)->Range(4, 64)->Complexity(benchmark::oNCubed);

void BM_ReachDirect(benchmark::State& state) {
    testing::Rng rng(8);
    auto const n = static_cast<std::size_t>(state.range(0));
    auto const m = testing::random_hqmc(rng, n, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(reach_measure(m, {static_cast<StateIndex>(n - 1)}));
    }
}
BENCHMARK(BM_ReachDirect)->RangeMultiplier(2)->Range(2, 32);

void BM_ReachKleene(benchmark::State& state) {
    testing::Rng rng(8);
    auto const n = static_cast<std::size_t>(state.range(0));
    auto const m = testing::random_hqmc(rng, n, 2);
    ReachOptions options;
    options.try_direct = false;
    for (auto _ : state) {
        benchmark::DoNotOptimize(reach_measure(m, {static_cast<StateIndex>(n - 1)}, options));
    }
}
BENCHMARK(BM_ReachKleene)->RangeMultiplier(2)->Range(2, 32);

}  // namespace
BENCHMARK_MAIN();
