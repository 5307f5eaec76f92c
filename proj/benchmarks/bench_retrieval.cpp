#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "biascheck/retrieval.hpp"

namespace {

std::vector<std::pair<std::string, std::string>> synthetic_corpus(std::size_t n_docs,
                                                                  std::size_t doc_len) {
    std::mt19937_64 rng(12);
    std::vector<std::string> vocab;
    for (int i = 0; i < 500; ++i) vocab.push_back("term" + std::to_string(i));
    std::vector<std::pair<std::string, std::string>> items;
    items.reserve(n_docs);
    for (std::size_t d = 0; d < n_docs; ++d) {
        std::string text;
        for (std::size_t w = 0; w < doc_len; ++w) {
            text += vocab[rng() % vocab.size()];
            text += ' ';
        }
        items.emplace_back("doc-" + std::to_string(d), text);
    }
    return items;
}

std::vector<std::string> synthetic_query(std::size_t len) {
    std::mt19937_64 rng(34);
    std::vector<std::string> query;
    for (std::size_t i = 0; i < len; ++i) {
        query.push_back("term" + std::to_string(rng() % 500));
    }
    return query;
}

}  // namespace

static void BM_Bm25Build(benchmark::State& state) {
    const auto items = synthetic_corpus(static_cast<std::size_t>(state.range(0)), 24);
    for (auto _ : state) {
        auto index = biascheck::retrieval::Bm25Index::build(items);
        benchmark::DoNotOptimize(index);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Bm25Build)->RangeMultiplier(4)->Range(256, 16384)->Complexity();

static void BM_Bm25Retrieve(benchmark::State& state) {
    const auto items = synthetic_corpus(static_cast<std::size_t>(state.range(0)), 24);
    const auto index = biascheck::retrieval::Bm25Index::build(items);
    // A HyDE-style query: claim plus several generated passages.
    const auto query = synthetic_query(220);
    for (auto _ : state) {
        auto ranked = index.retrieve(query, 5000);
        benchmark::DoNotOptimize(ranked);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Bm25Retrieve)->RangeMultiplier(4)->Range(256, 16384)->Complexity();

static void BM_Tokenize(benchmark::State& state) {
    const auto items = synthetic_corpus(1, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto tokens = biascheck::retrieval::tokenize(items.front().second);
        benchmark::DoNotOptimize(tokens);
    }
}
BENCHMARK(BM_Tokenize)->Range(64, 4096);
