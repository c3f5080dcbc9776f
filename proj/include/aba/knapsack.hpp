#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "aba/errors.hpp"
#include "aba/grid.hpp"

namespace aba {

// One row of predicted values per sub-campaign, aligned to a BudgetGrid.
using RewardTable = std::vector<std::vector<double>>;

struct Allocation {
    std::vector<std::size_t> grid_index;
    std::vector<double> per_campaign_budget;
    double total_value = 0.0;
    double total_budget = 0.0;
};

namespace detail {

inline void validate_table(const RewardTable& table, const BudgetGrid& grid) {
    if (table.empty()) {
        throw ConfigError("reward table has no sub-campaigns");
    }
    for (const auto& row : table) {
        if (row.size() != grid.size()) {
            throw ConfigError("reward table row length " + std::to_string(row.size()) +
                              " does not match grid size " + std::to_string(grid.size()));
        }
        for (double v : row) {
            if (!std::isfinite(v)) {
                throw ConfigError("reward table contains a non-finite value");
            }
        }
    }
}

// Number of grid steps the campaigns may share above their minimum budgets.
inline std::size_t cap_units(const BudgetGrid& grid, std::size_t campaigns, double cap) {
    const double floor_spend = static_cast<double>(campaigns) * grid.min();
    const double tol = 1e-9 * std::max(1.0, std::abs(cap));
    if (cap + tol < floor_spend) {
        throw InfeasibleCap("cap " + std::to_string(cap) + " is below the minimum joint spend " +
                            std::to_string(floor_spend));
    }
    const std::size_t all = campaigns * (grid.size() - 1);
    if (grid.size() == 1) {
        return 0;
    }
    const double units = (cap - floor_spend) / grid.step();
    if (units >= static_cast<double>(all)) {
        return all;
    }
    return static_cast<std::size_t>(std::floor(units + 1e-9));
}

inline Allocation make_allocation(const BudgetGrid& grid, std::vector<std::size_t> idx, double value) {
    Allocation a;
    a.grid_index = std::move(idx);
    a.total_value = value;
    for (std::size_t k : a.grid_index) {
        a.per_campaign_budget.push_back(grid[k]);
        a.total_budget += grid[k];
    }
    return a;
}

} // namespace detail

// Multi-choice knapsack by dynamic programming over grid indices, O(N H^2).
//
// best[j][c] is the best value of campaigns 0..j using exactly c grid steps.
// Unreachable states hold -inf so negative rewards stay correct. Ties are
// broken toward the smallest total spend, then the smallest budget for the
// last campaign, then the one before it, and so on.
inline Allocation solve_mck(const RewardTable& table, const BudgetGrid& grid, double cap) {
    detail::validate_table(table, grid);
    const std::size_t n = table.size();
    const std::size_t h = grid.size();
    const std::size_t units = detail::cap_units(grid, n, cap);
    constexpr double kNegInf = -std::numeric_limits<double>::infinity();

    std::vector<std::vector<double>> best(n, std::vector<double>(units + 1, kNegInf));
    std::vector<std::vector<std::size_t>> choice(n, std::vector<std::size_t>(units + 1, 0));
    for (std::size_t c = 0; c <= units && c < h; ++c) {
        best[0][c] = table[0][c];
        choice[0][c] = c;
    }
    for (std::size_t j = 1; j < n; ++j) {
        const auto& row = table[j];
        for (std::size_t c = 0; c <= units; ++c) {
            double top = kNegInf;
            std::size_t arg = 0;
            const std::size_t kmax = std::min(c, h - 1);
            for (std::size_t k = 0; k <= kmax; ++k) {
                const double prev = best[j - 1][c - k];
                if (prev == kNegInf) {
                    continue;
                }
                const double v = prev + row[k];
                if (v > top) {
                    top = v;
                    arg = k;
                }
            }
            best[j][c] = top;
            choice[j][c] = arg;
        }
    }

    std::size_t total = 0;
    double value = kNegInf;
    for (std::size_t c = 0; c <= units; ++c) {
        if (best[n - 1][c] > value) {
            value = best[n - 1][c];
            total = c;
        }
    }
    std::vector<std::size_t> idx(n, 0);
    for (std::size_t j = n; j-- > 0;) {
        idx[j] = choice[j][total];
        total -= idx[j];
    }
    return detail::make_allocation(grid, std::move(idx), value);
}

inline constexpr std::size_t kBruteForceMaxCampaigns = 5;
inline constexpr std::size_t kBruteForceMaxLevels = 15;

// Exhaustive enumeration of all H^N joint choices. Test oracle only; uses
// the same tie-breaking order as solve_mck.
inline Allocation brute_force_mck(const RewardTable& table, const BudgetGrid& grid, double cap) {
    detail::validate_table(table, grid);
    const std::size_t n = table.size();
    const std::size_t h = grid.size();
    if (n > kBruteForceMaxCampaigns || h > kBruteForceMaxLevels) {
        throw ConfigError("brute_force_mck is limited to N <= 5 and H <= 15");
    }
    const std::size_t units = detail::cap_units(grid, n, cap);

    std::vector<std::size_t> idx(n, 0);
    std::vector<std::size_t> best_idx;
    double best_value = -std::numeric_limits<double>::infinity();
    std::size_t best_total = 0;

    // true when idx should replace best_idx among equal values
    auto preferred = [&](std::size_t total) {
        if (total != best_total) {
            return total < best_total;
        }
        for (std::size_t j = n; j-- > 0;) {
            if (idx[j] != best_idx[j]) {
                return idx[j] < best_idx[j];
            }
        }
        return false;
    };

    while (true) {
        std::size_t total = 0;
        for (std::size_t k : idx) {
            total += k;
        }
        if (total <= units) {
            double v = table[0][idx[0]];
            for (std::size_t j = 1; j < n; ++j) {
                v += table[j][idx[j]];
            }
            if (best_idx.empty() || v > best_value || (v == best_value && preferred(total))) {
                best_value = v;
                best_idx = idx;
                best_total = total;
            }
        }
        std::size_t j = 0;
        while (j < n && ++idx[j] == h) {
            idx[j] = 0;
            ++j;
        }
        if (j == n) {
            break;
        }
    }
    return detail::make_allocation(grid, std::move(best_idx), best_value);
}

} // namespace aba
