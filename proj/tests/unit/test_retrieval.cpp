#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "biascheck/errors.hpp"
#include "biascheck/gateway.hpp"
#include "biascheck/retrieval.hpp"
#include "support/oracles.hpp"

using namespace biascheck;
using retrieval::Bm25Index;
using retrieval::tokenize;

TEST_CASE("tokenize rules") {
    CHECK(tokenize("Sean Connery's letter") ==
          std::vector<std::string>{"sean", "connery", "s", "letter"});
    CHECK(tokenize("5G causes COVID-19.") ==
          std::vector<std::string>{"5g", "causes", "covid", "19"});
    CHECK(tokenize("") == std::vector<std::string>{});
    CHECK(tokenize("...!!!") == std::vector<std::string>{});
    CHECK(tokenize("a  b\tc\nd") == std::vector<std::string>{"a", "b", "c", "d"});
}

TEST_CASE("build_index statistics") {
    const auto index = Bm25Index::build(
        {{"d1", "apple banana"}, {"d2", "banana split"}, {"d3", "plain apple"}});
    CHECK(index.n_items() == 3);
    CHECK(index.avg_doc_length() == doctest::Approx(2.0));
    CHECK(index.doc_length("d1") == 2);

    const auto postings = index.postings_for("apple");
    REQUIRE(postings.size() == 2);
    CHECK(postings[0].first == "d1");
    CHECK(postings[1].first == "d3");

    const auto repeated = Bm25Index::build({{"d1", "a a a"}});
    const auto reps = repeated.postings_for("a");
    REQUIRE(reps.size() == 1);
    CHECK(reps[0].second == 3);
}

TEST_CASE("build_index rejects duplicates and bad parameters") {
    CHECK_THROWS_AS(Bm25Index::build({{"d1", "x"}, {"d1", "y"}}), DataError);
    CHECK_THROWS_AS(Bm25Index::build({{"d1", "x"}}, 0.0, 0.4), std::invalid_argument);
    CHECK_THROWS_AS(Bm25Index::build({{"d1", "x"}}, 0.9, 1.5), std::invalid_argument);
}

TEST_CASE("empty corpus retrieves nothing") {
    const auto index = Bm25Index::build({});
    CHECK(index.n_items() == 0);
    CHECK(index.retrieve({"anything"}, 10).entries.empty());
}

TEST_CASE("shorter document outranks longer one at equal tf") {
    const auto index = Bm25Index::build({{"d1", "apple banana"}, {"d2", "banana"}});
    const auto ranked = index.retrieve({"banana"}, 10);
    REQUIRE(ranked.entries.size() == 2);
    CHECK(ranked.entries[0].item_id == "d2");
    CHECK(ranked.entries[1].item_id == "d1");
    CHECK(ranked.entries[0].score > ranked.entries[1].score);
}

TEST_CASE("absent query terms yield an empty result") {
    const auto index = Bm25Index::build({{"d1", "apple banana"}, {"d2", "banana"}});
    CHECK(index.retrieve({"cherry"}, 10).entries.empty());
}

TEST_CASE("k truncates the result") {
    const auto index = Bm25Index::build(
        {{"d1", "apple"}, {"d2", "apple"}, {"d3", "apple"}});
    CHECK(index.retrieve({"apple"}, 1).entries.size() == 1);
}

TEST_CASE("BM25 score is monotone in term frequency") {
    // Same doc length, growing tf of the query term.
    const auto index = Bm25Index::build({{"d1", "x pad pad pad"},
                                         {"d2", "x x pad pad"},
                                         {"d3", "x x x pad"}});
    const auto ranked = index.retrieve({"x"}, 10);
    REQUIRE(ranked.entries.size() == 3);
    CHECK(ranked.entries[0].item_id == "d3");
    CHECK(ranked.entries[1].item_id == "d2");
    CHECK(ranked.entries[2].item_id == "d1");
}

TEST_CASE("retrieve matches the brute-force oracle on random corpora") {
    std::mt19937_64 rng(2024);
    const std::vector<std::string> vocab = {"alpha", "beta", "gamma", "delta", "epsilon",
                                            "zeta", "eta", "theta", "iota", "kappa"};
    for (int trial = 0; trial < 40; ++trial) {
        const auto n_docs = 1 + rng() % 30;
        std::vector<std::pair<std::string, std::string>> items;
        for (std::size_t d = 0; d < n_docs; ++d) {
            std::string text;
            const auto len = 1 + rng() % 12;
            for (std::size_t w = 0; w < len; ++w) {
                text += vocab[rng() % vocab.size()];
                text += ' ';
            }
            items.emplace_back("doc-" + std::to_string(d), text);
        }
        std::vector<std::string> query;
        const auto qlen = 1 + rng() % 6;
        for (std::size_t w = 0; w < qlen; ++w) query.push_back(vocab[rng() % vocab.size()]);
        const auto k = 1 + rng() % 10;

        const auto index = Bm25Index::build(items, 0.9, 0.4);
        const auto got = index.retrieve(query, k);
        const auto expected = oracles::bm25_brute_force(items, query, k, 0.9, 0.4);
        REQUIRE(got.entries.size() == expected.entries.size());
        for (std::size_t i = 0; i < got.entries.size(); ++i) {
            CHECK(got.entries[i].item_id == expected.entries[i].item_id);
            CHECK(got.entries[i].score == expected.entries[i].score);  // bitwise equal
        }
    }
}

TEST_CASE("retrieve leaves the index unchanged") {
    const auto index = Bm25Index::build({{"d1", "apple banana"}, {"d2", "banana"}});
    const auto before_avg = index.avg_doc_length();
    const auto before_n = index.n_items();
    (void)index.retrieve({"banana", "apple"}, 5);
    (void)index.retrieve({"apple"}, 1);
    CHECK(index.avg_doc_length() == before_avg);
    CHECK(index.n_items() == before_n);
}

namespace {

gateway::Gateway lexical_gateway() {
    return gateway::Gateway(nullptr, std::make_shared<gateway::LexicalEmbedder>());
}

}  // namespace

TEST_CASE("rerank puts the claim-identical candidate first") {
    auto gw = lexical_gateway();
    corpus::Claim claim{"c1", "wild salmon returned to the river", {}, {}, {}};
    std::vector<retrieval::Candidate> candidates = {
        {"s1", "the stock market fell sharply today", "https://a.example.com"},
        {"s2", "wild salmon returned to the river", "https://b.example.com"},
        {"s3", "a new bridge opened downtown", "https://c.example.com"},
    };
    const auto evidence = retrieval::rerank(claim, candidates, gw, 3);
    REQUIRE(evidence.entries.size() == 3);
    CHECK(evidence.entries[0].item_id == "s2");
    CHECK(evidence.entries[0].score == doctest::Approx(1.0));
    CHECK(evidence.entries[0].url == "https://b.example.com");
}

TEST_CASE("rerank with n beyond the candidate count returns all, sorted") {
    auto gw = lexical_gateway();
    corpus::Claim claim{"c1", "alpha beta gamma", {}, {}, {}};
    std::vector<retrieval::Candidate> candidates = {
        {"s1", "alpha beta gamma", ""},
        {"s2", "alpha unrelated words", ""},
    };
    const auto evidence = retrieval::rerank(claim, candidates, gw, 99);
    REQUIRE(evidence.entries.size() == 2);
    CHECK(evidence.entries[0].score >= evidence.entries[1].score);
}

TEST_CASE("rerank order matches brute-force cosine with the lexical embedder") {
    auto gw = lexical_gateway();
    corpus::Claim claim{"c1", "the council banned cars downtown", {}, {}, {}};
    std::vector<retrieval::Candidate> candidates = {
        {"s1", "the council introduced a congestion charge downtown", ""},
        {"s2", "cars remain allowed downtown after the council vote", ""},
        {"s3", "a cooking festival opened this weekend", ""},
    };
    const auto evidence = retrieval::rerank(claim, candidates, gw, 3);

    gateway::LexicalEmbedder embedder;
    std::vector<std::string> texts{claim.text};
    for (const auto& c : candidates) texts.push_back(c.text);
    const auto vecs = embedder.embed(texts);
    std::vector<std::pair<std::string, double>> expected;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        expected.emplace_back(candidates[i].item_id,
                              gateway::cosine(vecs[0], vecs[i + 1]));
    }
    std::sort(expected.begin(), expected.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    REQUIRE(evidence.entries.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        CHECK(evidence.entries[i].item_id == expected[i].first);
        CHECK(evidence.entries[i].score == doctest::Approx(expected[i].second));
    }
}

TEST_CASE("rerank of nothing is nothing") {
    auto gw = lexical_gateway();
    corpus::Claim claim{"c1", "anything", {}, {}, {}};
    CHECK(retrieval::rerank(claim, {}, gw, 5).entries.empty());
}

TEST_CASE("query_for_condition unions claim and document tokens") {
    corpus::Claim claim{"c1", "5G causes COVID-19.", {}, {}, {}};
    CHECK(retrieval::query_for_condition(claim, {}) == tokenize(claim.text));

    hyde::HypotheticalDocument d1{"c1", hyde::BiasCondition::Positive, 0,
                                  "Radio waves carry no virus.", false, {}};
    hyde::HypotheticalDocument d2{"c1", hyde::BiasCondition::Positive, 1,
                                  "I am unable to verify the claim.", true, {}};
    const auto query = retrieval::query_for_condition(claim, {d1, d2});
    // Concatenation: claim tokens, then each document's tokens, refusals included.
    std::vector<std::string> expected = tokenize(claim.text);
    for (const auto& t : tokenize(d1.text)) expected.push_back(t);
    for (const auto& t : tokenize(d2.text)) expected.push_back(t);
    CHECK(query == expected);
    CHECK(std::count(query.begin(), query.end(), "unable") == 1);
    CHECK(std::count(query.begin(), query.end(), "verify") == 1);
}
