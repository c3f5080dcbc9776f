#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "aba/errors.hpp"
#include "aba/grid.hpp"
#include "aba/knapsack.hpp"
#include "aba/sim.hpp"

namespace aba {

// Allocation chosen with the true reward curves on the policy's grid.
inline Allocation oracle_allocate(std::span<const PowerLawModel> true_models, const BudgetGrid& grid, double cap) {
    RewardTable table(true_models.size(), std::vector<double>(grid.size()));
    for (std::size_t j = 0; j < true_models.size(); ++j) {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            table[j][i] = expected_reward(true_models[j], grid[i]);
        }
    }
    return solve_mck(table, grid, cap);
}

inline double expected_value(std::span<const PowerLawModel> true_models, std::span<const double> budgets) {
    if (true_models.size() != budgets.size()) {
        throw ConfigError("expected_value: one budget per model required");
    }
    double total = 0.0;
    for (std::size_t j = 0; j < budgets.size(); ++j) {
        total += expected_reward(true_models[j], budgets[j]);
    }
    return total;
}

// Gap in noise-free expected reward between the oracle's and the policy's
// budgets. Nonnegative whenever both come from the same grid and cap.
inline double instantaneous_regret(std::span<const PowerLawModel> true_models, const Allocation& oracle,
                                   const Allocation& policy) {
    return expected_value(true_models, oracle.per_campaign_budget) -
           expected_value(true_models, policy.per_campaign_budget);
}

struct SpendRecord {
    double cost = 0.0;
    double clicks = 0.0;
};

// Group-level cost per click: total cost over total clicks. Absent when no
// clicks were recorded.
inline std::optional<double> cpc_metric(std::span<const SpendRecord> history) {
    double cost = 0.0;
    double clicks = 0.0;
    for (const auto& r : history) {
        cost += r.cost;
        clicks += r.clicks;
    }
    if (!(clicks > 0.0)) {
        return std::nullopt;
    }
    return cost / clicks;
}

inline constexpr std::size_t kPseudoConversionWindow = 7;

// Clicks over the 7 days ending at `day` (inclusive) scaled by the conversion
// rate over the same days. Needs a full window, so day >= 6.
inline double pseudo_conversion(std::span<const double> clicks, std::span<const double> conversions, std::size_t day) {
    if (clicks.size() != conversions.size()) {
        throw ConfigError("pseudo_conversion: clicks and conversions series differ in length");
    }
    if (day >= clicks.size() || day + 1 < kPseudoConversionWindow) {
        throw ConfigError("pseudo_conversion: day must have a full 7-day window inside the series");
    }
    const std::size_t first = day + 1 - kPseudoConversionWindow;
    double window_clicks = 0.0;
    double window_conversions = 0.0;
    for (std::size_t t = first; t <= day; ++t) {
        window_clicks += clicks[t];
        window_conversions += conversions[t];
    }
    if (!(window_clicks > 0.0)) {
        return 0.0;
    }
    // product first: exact for integer counts, where the identity with the
    // window's conversion total must hold bit for bit
    return window_clicks * window_conversions / window_clicks;
}

// One row of the per-day metrics stream.
struct DailyMetrics {
    std::size_t day = 0;
    std::vector<double> budgets;
    std::vector<double> costs;
    std::vector<double> rewards;
    std::vector<double> oracle_budgets;
    std::vector<double> oracle_values; // per campaign, expected reward at the oracle budget
    std::vector<double> policy_values; // per campaign, expected reward at the chosen budget
    double oracle_value = 0.0;
    double policy_value = 0.0;
    double regret = 0.0;
    double realized_regret = 0.0;
    double cumulative_clicks = 0.0;
    double cumulative_regret = 0.0;
    std::optional<double> running_cpc;
};

} // namespace aba
