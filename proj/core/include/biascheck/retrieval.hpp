#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "biascheck/corpus.hpp"
#include "biascheck/hyde.hpp"

namespace biascheck::gateway {
class Gateway;
}

namespace biascheck::retrieval {

// Lowercases and splits on any non-alphanumeric byte; empty tokens are
// dropped. ASCII only: non-ASCII bytes act as separators. No stemming, no
// stopword removal.
std::vector<std::string> tokenize(std::string_view text);

struct RankedEntry {
    std::string item_id;
    double score;
};

struct RankedList {
    std::vector<RankedEntry> entries;
};

struct EvidenceEntry {
    std::string item_id;
    std::string text;
    std::string url;
    double score;
};

struct RankedEvidence {
    std::vector<EvidenceEntry> entries;
};

struct Candidate {
    std::string item_id;
    std::string text;
    std::string url;
};

// Okapi BM25 inverted index. Immutable after build; safe for concurrent
// retrieval.
class Bm25Index {
public:
    // Throws DataError on duplicate item ids; std::invalid_argument on bad
    // k1/b (requires k1 > 0 and 0 <= b <= 1).
    static Bm25Index build(const std::vector<std::pair<std::string, std::string>>& items,
                           double k1 = 0.9, double b = 0.4);

    // Scores with idf = ln(1 + (N - df + 0.5) / (df + 0.5)); one contribution
    // per query token occurrence. Top k by score, ties broken by ascending
    // item_id; zero-score items excluded.
    RankedList retrieve(const std::vector<std::string>& query, std::size_t k) const;

    std::size_t n_items() const { return item_ids_.size(); }
    double avg_doc_length() const { return avg_doc_length_; }
    double k1() const { return k1_; }
    double b() const { return b_; }
    std::size_t doc_length(std::string_view item_id) const;
    // (item_id, term frequency) postings for one term; empty if absent.
    std::vector<std::pair<std::string, std::uint32_t>> postings_for(std::string_view term) const;

private:
    Bm25Index() = default;

    std::vector<std::string> item_ids_;
    std::vector<std::uint32_t> doc_lengths_;
    std::unordered_map<std::string, std::vector<std::pair<std::uint32_t, std::uint32_t>>> postings_;
    double avg_doc_length_ = 0.0;
    double k1_ = 0.9;
    double b_ = 0.4;
};

// Embedding rerank: candidates scored by cosine against the claim embedding,
// top n kept, ties broken by ascending item_id. A candidate whose embedding
// has zero norm scores 0.
RankedEvidence rerank(const corpus::Claim& claim, const std::vector<Candidate>& candidates,
                      gateway::Gateway& gateway, std::size_t n);

// Token multiset union of the claim text and every hypothetical document
// (refusal documents included).
std::vector<std::string> query_for_condition(const corpus::Claim& claim,
                                             const std::vector<hyde::HypotheticalDocument>& docs);

}  // namespace biascheck::retrieval
