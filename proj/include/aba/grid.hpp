#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "aba/errors.hpp"

namespace aba {

// Evenly spaced budget levels from min_budget to max_budget inclusive.
// A single-level grid is allowed for the degenerate cap == min_budget day.
class BudgetGrid {
  public:
    BudgetGrid(double min_budget, double max_budget, std::size_t levels)
        : min_(min_budget), max_(max_budget) {
        if (levels == 0) {
            throw ConfigError("budget grid needs at least one level");
        }
        if (!(min_budget >= 0.0) || !(max_budget >= min_budget)) {
            throw ConfigError("budget grid bounds must satisfy 0 <= min <= max");
        }
        if (levels > 1 && max_budget == min_budget) {
            levels = 1;
        }
        values_.resize(levels);
        step_ = levels > 1 ? (max_budget - min_budget) / static_cast<double>(levels - 1) : 0.0;
        for (std::size_t i = 0; i < levels; ++i) {
            values_[i] = min_budget + step_ * static_cast<double>(i);
        }
        values_.back() = max_budget;
    }

    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    double min() const { return min_; }
    double max() const { return max_; }
    double step() const { return step_; }
    std::span<const double> values() const { return values_; }
    auto begin() const { return values_.begin(); }
    auto end() const { return values_.end(); }

    // Closest level to a budget, clamped to the grid range.
    std::size_t nearest_index(double budget) const {
        if (size() == 1 || budget <= min_) {
            return 0;
        }
        if (budget >= max_) {
            return size() - 1;
        }
        const auto idx = static_cast<std::size_t>(std::llround((budget - min_) / step_));
        return std::min(idx, size() - 1);
    }

  private:
    std::vector<double> values_;
    double min_;
    double max_;
    double step_;
};

} // namespace aba
