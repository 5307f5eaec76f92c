#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "biascheck/metrics.hpp"
#include "biascheck/text_similarity.hpp"

namespace {

biascheck::retrieval::RankedList random_ranking(std::size_t n, std::uint64_t seed) {
    std::vector<std::string> ids;
    ids.reserve(n);
    for (std::size_t i = 0; i < n; ++i) ids.push_back("item-" + std::to_string(i));
    std::mt19937_64 rng(seed);
    std::shuffle(ids.begin(), ids.end(), rng);
    biascheck::retrieval::RankedList list;
    double score = static_cast<double>(n);
    for (auto& id : ids) list.entries.push_back({std::move(id), score--});
    return list;
}

}  // namespace

static void BM_KendallTau(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto a = random_ranking(n, 1);
    const auto b = random_ranking(n, 2);
    for (auto _ : state) {
        auto tau = biascheck::metrics::kendall_tau(a, b);
        benchmark::DoNotOptimize(tau);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KendallTau)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

static void BM_TokenSimilarity(benchmark::State& state) {
    std::mt19937_64 rng(3);
    std::string a;
    std::string b;
    for (int i = 0; i < state.range(0); ++i) {
        a += "word" + std::to_string(rng() % 40) + " ";
        b += "word" + std::to_string(rng() % 40) + " ";
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(biascheck::metrics::token_similarity(a, b));
    }
}
BENCHMARK(BM_TokenSimilarity)->Range(8, 512);
