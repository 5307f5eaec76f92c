#include "biascheck/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "biascheck/errors.hpp"
#include "biascheck/gateway.hpp"

namespace biascheck::retrieval {

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char c : text) {
        const auto uc = static_cast<unsigned char>(c);
        if ((uc >= 'a' && uc <= 'z') || (uc >= '0' && uc <= '9')) {
            current.push_back(c);
        } else if (uc >= 'A' && uc <= 'Z') {
            current.push_back(static_cast<char>(uc - 'A' + 'a'));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) {
        tokens.push_back(std::move(current));
    }
    return tokens;
}

Bm25Index Bm25Index::build(const std::vector<std::pair<std::string, std::string>>& items,
                           double k1, double b) {
    if (!(k1 > 0.0)) {
        throw std::invalid_argument("Bm25Index: k1 must be > 0");
    }
    if (b < 0.0 || b > 1.0) {
        throw std::invalid_argument("Bm25Index: b must be in [0, 1]");
    }

    Bm25Index index;
    index.k1_ = k1;
    index.b_ = b;
    index.item_ids_.reserve(items.size());
    index.doc_lengths_.reserve(items.size());

    std::unordered_map<std::string, std::uint32_t> ordinal_of;
    std::uint64_t total_length = 0;
    for (const auto& [item_id, text] : items) {
        const auto ordinal = static_cast<std::uint32_t>(index.item_ids_.size());
        if (!ordinal_of.emplace(item_id, ordinal).second) {
            throw DataError("Bm25Index: duplicate item_id '" + item_id + "'");
        }
        index.item_ids_.push_back(item_id);

        const auto tokens = tokenize(text);
        index.doc_lengths_.push_back(static_cast<std::uint32_t>(tokens.size()));
        total_length += tokens.size();

        std::unordered_map<std::string, std::uint32_t> tf;
        for (const auto& token : tokens) ++tf[token];
        for (const auto& [term, count] : tf) {
            index.postings_[term].emplace_back(ordinal, count);
        }
    }
    // Postings in item order, independent of hash iteration.
    for (auto& [term, list] : index.postings_) {
        std::sort(list.begin(), list.end(),
                  [](const auto& a, const auto& b2) { return a.first < b2.first; });
    }
    index.avg_doc_length_ =
        index.item_ids_.empty() ? 0.0
                                : static_cast<double>(total_length) /
                                      static_cast<double>(index.item_ids_.size());
    return index;
}

RankedList Bm25Index::retrieve(const std::vector<std::string>& query, std::size_t k) const {
    RankedList result;
    if (item_ids_.empty() || query.empty() || k == 0) {
        return result;
    }

    const auto n = static_cast<double>(item_ids_.size());
    std::vector<double> scores(item_ids_.size(), 0.0);
    for (const auto& token : query) {
        const auto it = postings_.find(token);
        if (it == postings_.end()) continue;
        const double df = static_cast<double>(it->second.size());
        const double idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
        for (const auto& [ordinal, tf] : it->second) {
            const double dl = static_cast<double>(doc_lengths_[ordinal]);
            const double denom =
                static_cast<double>(tf) + k1_ * (1.0 - b_ + b_ * dl / avg_doc_length_);
            scores[ordinal] += idf * (static_cast<double>(tf) * (k1_ + 1.0)) / denom;
        }
    }

    std::vector<std::uint32_t> hits;
    for (std::uint32_t i = 0; i < scores.size(); ++i) {
        if (scores[i] > 0.0) hits.push_back(i);
    }
    std::sort(hits.begin(), hits.end(), [&](std::uint32_t a, std::uint32_t b2) {
        if (scores[a] != scores[b2]) return scores[a] > scores[b2];
        return item_ids_[a] < item_ids_[b2];
    });
    if (hits.size() > k) hits.resize(k);

    result.entries.reserve(hits.size());
    for (auto i : hits) {
        result.entries.push_back({item_ids_[i], scores[i]});
    }
    return result;
}

std::size_t Bm25Index::doc_length(std::string_view item_id) const {
    for (std::size_t i = 0; i < item_ids_.size(); ++i) {
        if (item_ids_[i] == item_id) return doc_lengths_[i];
    }
    throw DataError("Bm25Index: unknown item_id '" + std::string(item_id) + "'");
}

std::vector<std::pair<std::string, std::uint32_t>> Bm25Index::postings_for(
    std::string_view term) const {
    std::vector<std::pair<std::string, std::uint32_t>> out;
    const auto it = postings_.find(std::string(term));
    if (it == postings_.end()) return out;
    out.reserve(it->second.size());
    for (const auto& [ordinal, tf] : it->second) {
        out.emplace_back(item_ids_[ordinal], tf);
    }
    return out;
}

RankedEvidence rerank(const corpus::Claim& claim, const std::vector<Candidate>& candidates,
                      gateway::Gateway& gateway, std::size_t n) {
    RankedEvidence evidence;
    if (candidates.empty() || n == 0) {
        return evidence;
    }

    std::vector<std::string> texts;
    texts.reserve(candidates.size() + 1);
    texts.push_back(claim.text);
    for (const auto& c : candidates) texts.push_back(c.text);
    const auto vectors = gateway.embed(texts);

    const auto& claim_vec = vectors.front();
    auto norm2 = [](const gateway::EmbeddingVector& v) {
        double s = 0.0;
        for (double x : v.values) s += x * x;
        return s;
    };
    const bool claim_zero = norm2(claim_vec) == 0.0;

    std::vector<std::size_t> order(candidates.size());
    std::vector<double> scores(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        order[i] = i;
        const auto& vec = vectors[i + 1];
        scores[i] =
            (claim_zero || norm2(vec) == 0.0) ? 0.0 : gateway::cosine(claim_vec, vec);
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return candidates[a].item_id < candidates[b].item_id;
    });
    if (order.size() > n) order.resize(n);

    evidence.entries.reserve(order.size());
    for (auto i : order) {
        evidence.entries.push_back({candidates[i].item_id, candidates[i].text,
                                    candidates[i].url, scores[i]});
    }
    return evidence;
}

std::vector<std::string> query_for_condition(const corpus::Claim& claim,
                                             const std::vector<hyde::HypotheticalDocument>& docs) {
    std::vector<std::string> query = tokenize(claim.text);
    for (const auto& doc : docs) {
        auto tokens = tokenize(doc.text);
        query.insert(query.end(), std::make_move_iterator(tokens.begin()),
                     std::make_move_iterator(tokens.end()));
    }
    return query;
}

}  // namespace biascheck::retrieval
