#include "biascheck/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace biascheck::metrics {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Minimizing Hungarian on a square matrix, 1-based potentials formulation.
// Returns col -> row of the optimal perfect matching.
std::vector<int> solve_square_min(const std::vector<std::vector<double>>& a) {
    const int n = static_cast<int>(a.size());
    std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<int> p(static_cast<std::size_t>(n) + 1, 0);
    std::vector<int> way(static_cast<std::size_t>(n) + 1, 0);

    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(static_cast<std::size_t>(n) + 1, kInf);
        std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
        do {
            used[static_cast<std::size_t>(j0)] = 1;
            const int i0 = p[static_cast<std::size_t>(j0)];
            int j1 = 0;
            double delta = kInf;
            for (int j = 1; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)]) continue;
                const double cur =
                    a[static_cast<std::size_t>(i0 - 1)][static_cast<std::size_t>(j - 1)] -
                    u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
                if (cur < minv[static_cast<std::size_t>(j)]) {
                    minv[static_cast<std::size_t>(j)] = cur;
                    way[static_cast<std::size_t>(j)] = j0;
                }
                if (minv[static_cast<std::size_t>(j)] < delta) {
                    delta = minv[static_cast<std::size_t>(j)];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)]) {
                    u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
                    v[static_cast<std::size_t>(j)] -= delta;
                } else {
                    minv[static_cast<std::size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (p[static_cast<std::size_t>(j0)] != 0);
        do {
            const int j1 = way[static_cast<std::size_t>(j0)];
            p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<int> row_of_col(static_cast<std::size_t>(n), -1);
    for (int j = 1; j <= n; ++j) {
        row_of_col[static_cast<std::size_t>(j - 1)] = p[static_cast<std::size_t>(j)] - 1;
    }
    return row_of_col;
}

// Optimal total over rows [row_from, rows) x free columns, choosing
// exactly `need` pairs of a minimization instance. Dummy rows/columns pad
// the submatrix to square at zero cost.
double sub_optimum(const std::vector<std::vector<double>>& eff, std::size_t row_from,
                   const std::vector<char>& col_used, std::size_t need) {
    if (need == 0) return 0.0;
    const std::size_t rows = eff.size();
    const std::size_t cols = eff.front().size();

    std::vector<std::size_t> rsub;
    for (std::size_t r = row_from; r < rows; ++r) rsub.push_back(r);
    std::vector<std::size_t> csub;
    for (std::size_t c = 0; c < cols; ++c) {
        if (!col_used[c]) csub.push_back(c);
    }

    const std::size_t n = std::max(rsub.size(), csub.size());
    std::vector<std::vector<double>> square(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < rsub.size(); ++i) {
        for (std::size_t j = 0; j < csub.size(); ++j) {
            square[i][j] = eff[rsub[i]][csub[j]];
        }
    }

    const std::vector<int> row_of_col = solve_square_min(square);
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const auto i = static_cast<std::size_t>(row_of_col[j]);
        if (i < rsub.size() && j < csub.size()) {
            total += square[i][j];
        }
    }
    return total;
}

}  // namespace

std::vector<AssignmentPair> hungarian_assignment(const std::vector<std::vector<double>>& cost,
                                                 bool maximize) {
    if (cost.empty() || cost.front().empty()) {
        throw std::invalid_argument("hungarian_assignment: empty cost matrix");
    }
    const std::size_t rows = cost.size();
    const std::size_t cols = cost.front().size();
    for (const auto& row : cost) {
        if (row.size() != cols) {
            throw std::invalid_argument("hungarian_assignment: ragged cost matrix");
        }
        for (double v : row) {
            if (!std::isfinite(v)) {
                throw std::invalid_argument("hungarian_assignment: non-finite entry");
            }
        }
    }

    // Work on a minimization instance.
    std::vector<std::vector<double>> eff(rows, std::vector<double>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            eff[r][c] = maximize ? -cost[r][c] : cost[r][c];
        }
    }

    std::vector<char> col_used(cols, 0);
    const double target = sub_optimum(eff, 0, col_used, std::min(rows, cols));

    // Lexicographic tie-break: walk rows in order and commit the smallest
    // column whose best completion still reaches the optimum. A row with no
    // such column is not part of any optimal assignment (possible only when
    // cols < rows) and is skipped.
    std::vector<AssignmentPair> pairs;
    std::size_t remaining = std::min(rows, cols);
    double fixed = 0.0;
    for (std::size_t row = 0; row < rows && remaining > 0; ++row) {
        for (std::size_t c = 0; c < cols; ++c) {
            if (col_used[c]) continue;
            col_used[c] = 1;
            const double rest = sub_optimum(eff, row + 1, col_used, remaining - 1);
            const double total = fixed + eff[row][c] + rest;
            if (std::abs(total - target) <= 1e-9 * (1.0 + std::abs(target))) {
                pairs.push_back({row, c});
                fixed += eff[row][c];
                --remaining;
                break;
            }
            col_used[c] = 0;
        }
    }
    if (remaining != 0) {
        throw std::logic_error("hungarian_assignment: failed to reconstruct optimum");
    }
    return pairs;
}

double assignment_total(const std::vector<std::vector<double>>& cost,
                        const std::vector<AssignmentPair>& pairs) {
    double total = 0.0;
    for (const auto& p : pairs) {
        total += cost[p.row][p.col];
    }
    return total;
}

}  // namespace biascheck::metrics
