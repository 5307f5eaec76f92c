#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "biascheck/assignment.hpp"

static void BM_HungarianAssignment(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    std::vector<std::vector<double>> cost(n, std::vector<double>(n));
    for (auto& row : cost) {
        for (auto& v : row) v = dist(rng);
    }
    for (auto _ : state) {
        auto pairs = biascheck::metrics::hungarian_assignment(cost, true);
        benchmark::DoNotOptimize(pairs);
    }
    state.SetComplexityN(state.range(0));
}
// Evidence-scoring matrices are ~10 questions a side.
BENCHMARK(BM_HungarianAssignment)->DenseRange(2, 14, 4)->Complexity();
