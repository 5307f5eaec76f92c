#pragma once

#include <cstddef>
#include <vector>

namespace biascheck::metrics {

struct AssignmentPair {
    std::size_t row;
    std::size_t col;

    friend bool operator==(const AssignmentPair&, const AssignmentPair&) = default;
};

// Optimal assignment on a rectangular cost matrix (Kuhn-Munkres with
// potentials, O(n^3) per solve). Returns min(rows, cols) pairs sorted by row.
// Among assignments with equal total, the lexicographically smallest pair
// list is returned; resolving those ties re-solves reduced instances, so the
// solver is intended for the small matrices of evidence scoring rather than
// large-scale matching.
//
// Throws std::invalid_argument on empty, ragged, or non-finite input.
std::vector<AssignmentPair> hungarian_assignment(const std::vector<std::vector<double>>& cost,
                                                 bool maximize);

// Total cost of an assignment, summed in row order.
double assignment_total(const std::vector<std::vector<double>>& cost,
                        const std::vector<AssignmentPair>& pairs);

}  // namespace biascheck::metrics
