#include "biascheck/text_similarity.hpp"

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

#include "biascheck/retrieval.hpp"

namespace biascheck::metrics {

double token_similarity(std::string_view a, std::string_view b) {
    const std::vector<std::string> ta = retrieval::tokenize(a);
    const std::vector<std::string> tb = retrieval::tokenize(b);
    if (ta.empty() || tb.empty()) {
        return 0.0;
    }

    // Greedy in-order alignment: a-position -> b-position.
    std::unordered_map<std::string, std::vector<std::size_t>> b_positions;
    for (std::size_t j = 0; j < tb.size(); ++j) {
        b_positions[tb[j]].push_back(j);
    }
    std::unordered_map<std::string, std::size_t> next_use;
    std::vector<std::pair<std::size_t, std::size_t>> aligned;
    for (std::size_t i = 0; i < ta.size(); ++i) {
        auto it = b_positions.find(ta[i]);
        if (it == b_positions.end()) continue;
        std::size_t& cursor = next_use[ta[i]];
        if (cursor < it->second.size()) {
            aligned.emplace_back(i, it->second[cursor]);
            ++cursor;
        }
    }

    const double matches = static_cast<double>(aligned.size());
    if (matches == 0.0) {
        return 0.0;
    }

    std::size_t chunks = 1;
    for (std::size_t k = 1; k < aligned.size(); ++k) {
        const bool contiguous = aligned[k].first == aligned[k - 1].first + 1 &&
                                aligned[k].second == aligned[k - 1].second + 1;
        if (!contiguous) ++chunks;
    }

    const double precision = matches / static_cast<double>(tb.size());
    const double recall = matches / static_cast<double>(ta.size());
    const double fmean = 10.0 * precision * recall / (recall + 9.0 * precision);
    double penalty = 0.0;
    if (chunks > 1) {
        const double frag = static_cast<double>(chunks) / matches;
        penalty = 0.5 * frag * frag * frag;
    }
    return fmean * (1.0 - penalty);
}

}  // namespace biascheck::metrics
