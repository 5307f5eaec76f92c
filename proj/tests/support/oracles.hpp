#pragma once

// Independent brute-force oracles used to check the library implementations.
// These deliberately take the slow, obvious route: full scoring + full sort
// for BM25, factorial enumeration for assignments, O(n^2) pair counting for
// Kendall tau.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <unordered_map>
#include <vector>

#include "biascheck/retrieval.hpp"

namespace oracles {

// Okapi BM25 over every item, full sort, same tie rule (score desc, id asc),
// zero scores dropped, truncated to k. Accumulates per item in query-token
// order so sums are bitwise comparable with the index path.
inline biascheck::retrieval::RankedList bm25_brute_force(
    const std::vector<std::pair<std::string, std::string>>& items,
    const std::vector<std::string>& query, std::size_t k, double k1, double b) {
    using biascheck::retrieval::tokenize;

    const double n = static_cast<double>(items.size());
    std::unordered_map<std::string, std::size_t> df;
    std::vector<std::map<std::string, std::uint32_t>> tfs(items.size());
    double total_len = 0.0;
    std::vector<double> lengths(items.size());
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto tokens = tokenize(items[i].second);
        lengths[i] = static_cast<double>(tokens.size());
        total_len += lengths[i];
        for (const auto& token : tokens) ++tfs[i][token];
        for (const auto& [term, tf] : tfs[i]) ++df[term];
    }
    const double avg_len = items.empty() ? 0.0 : total_len / n;

    std::vector<std::pair<std::string, double>> scored;
    for (std::size_t i = 0; i < items.size(); ++i) {
        double score = 0.0;
        for (const auto& token : query) {
            const auto it = tfs[i].find(token);
            if (it == tfs[i].end()) continue;
            const double d = static_cast<double>(df.at(token));
            const double idf = std::log(1.0 + (n - d + 0.5) / (d + 0.5));
            const double tf = static_cast<double>(it->second);
            score += idf * (tf * (k1 + 1.0)) / (tf + k1 * (1.0 - b + b * lengths[i] / avg_len));
        }
        if (score > 0.0) scored.emplace_back(items[i].first, score);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b2) {
        if (a.second != b2.second) return a.second > b2.second;
        return a.first < b2.first;
    });
    if (scored.size() > k) scored.resize(k);

    biascheck::retrieval::RankedList out;
    for (const auto& [id, score] : scored) out.entries.push_back({id, score});
    return out;
}

// Optimal assignment total by enumerating all permutations. Handles
// rectangular matrices by permuting over the larger side.
inline double assignment_brute_force(const std::vector<std::vector<double>>& cost,
                                     bool maximize) {
    const std::size_t rows = cost.size();
    const std::size_t cols = cost.front().size();
    double best = maximize ? -1e300 : 1e300;
    if (rows <= cols) {
        std::vector<std::size_t> perm(cols);
        std::iota(perm.begin(), perm.end(), 0);
        do {
            double total = 0.0;
            for (std::size_t r = 0; r < rows; ++r) total += cost[r][perm[r]];
            best = maximize ? std::max(best, total) : std::min(best, total);
        } while (std::next_permutation(perm.begin(), perm.end()));
    } else {
        std::vector<std::size_t> perm(rows);
        std::iota(perm.begin(), perm.end(), 0);
        do {
            double total = 0.0;
            for (std::size_t c = 0; c < cols; ++c) total += cost[perm[c]][c];
            best = maximize ? std::max(best, total) : std::min(best, total);
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
    return best;
}

// Kendall tau over common items by explicit pair counting.
inline std::optional<double> kendall_brute_force(const biascheck::retrieval::RankedList& a,
                                                 const biascheck::retrieval::RankedList& b) {
    std::unordered_map<std::string, std::size_t> rank_a;
    std::unordered_map<std::string, std::size_t> rank_b;
    for (std::size_t i = 0; i < a.entries.size(); ++i) rank_a[a.entries[i].item_id] = i;
    for (std::size_t i = 0; i < b.entries.size(); ++i) rank_b[b.entries[i].item_id] = i;

    std::vector<std::pair<std::size_t, std::size_t>> common;
    for (const auto& entry : a.entries) {
        const auto it = rank_b.find(entry.item_id);
        if (it != rank_b.end()) {
            common.emplace_back(rank_a.at(entry.item_id), it->second);
        }
    }
    const std::size_t n = common.size();
    if (n < 2) return std::nullopt;

    std::int64_t concordant = 0;
    std::int64_t discordant = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto da = static_cast<std::int64_t>(common[i].first) -
                            static_cast<std::int64_t>(common[j].first);
            const auto db = static_cast<std::int64_t>(common[i].second) -
                            static_cast<std::int64_t>(common[j].second);
            if (da * db > 0) ++concordant;
            else if (da * db < 0) ++discordant;
        }
    }
    const auto n0 = static_cast<std::uint64_t>(n) * (n - 1) / 2;
    return static_cast<double>(concordant - discordant) / static_cast<double>(n0);
}

}  // namespace oracles
