#pragma once

#include <string_view>

namespace biascheck::metrics {

// METEOR-style unigram similarity with exact lowercase token matching:
// recall-weighted harmonic mean Fmean = 10*P*R / (R + 9*P) where P counts
// matches against b's tokens and R against a's, scaled by a fragmentation
// penalty of 0.5 * (chunks / matches)^3. A single contiguous match carries
// no penalty, so identical texts score exactly 1. Alignment is greedy
// in-order (each a-token takes the earliest unmatched b occurrence); no
// stemming or synonymy. Returns 0 when either side has no tokens.
double token_similarity(std::string_view a, std::string_view b);

}  // namespace biascheck::metrics
