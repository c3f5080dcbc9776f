#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "aba/errors.hpp"
#include "aba/logged_data.hpp"
#include "aba/rng.hpp"

namespace aba {

// Ground-truth reward curve alpha * x^omega for one phase.
struct PowerLawModel {
    double alpha = 1.0;
    double omega = 1.0;

    void validate() const {
        if (!(alpha > 0.0) || !(omega > 0.0 && omega <= 1.0)) {
            throw ConfigError("power-law model needs alpha > 0 and 0 < omega <= 1");
        }
    }

    friend bool operator==(const PowerLawModel&, const PowerLawModel&) = default;
};

struct CostReward {
    double cost = 0.0;
    double reward = 0.0;
};

inline constexpr double kMinOmega = 1e-3;

// Least squares on log(reward) = log(alpha) + omega * log(cost), using only
// points with cost > 0 and reward > 0. omega is clamped to (0, 1]; when the
// clamp is active the intercept is re-estimated with omega held fixed.
inline PowerLawModel fit_power_law(std::span<const CostReward> points) {
    std::vector<std::pair<double, double>> logs;
    logs.reserve(points.size());
    for (const auto& p : points) {
        if (p.cost > 0.0 && p.reward > 0.0 && std::isfinite(p.cost) && std::isfinite(p.reward)) {
            logs.emplace_back(std::log(p.cost), std::log(p.reward));
        }
    }
    if (logs.size() < 2) {
        throw InsufficientData("power-law fit needs at least 2 points with positive cost and reward, got " +
                               std::to_string(logs.size()));
    }
    const double n = static_cast<double>(logs.size());
    double mx = 0.0;
    double my = 0.0;
    for (const auto& [lx, ly] : logs) {
        mx += lx;
        my += ly;
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (const auto& [lx, ly] : logs) {
        sxx += (lx - mx) * (lx - mx);
        sxy += (lx - mx) * (ly - my);
    }
    if (!(sxx > 1e-12 * n)) {
        throw InsufficientData("power-law fit needs at least 2 distinct positive costs");
    }
    double omega = sxy / sxx;
    double log_alpha = my - omega * mx;
    if (omega > 1.0 || omega < kMinOmega) {
        omega = std::clamp(omega, kMinOmega, 1.0);
        log_alpha = my - omega * mx;
    }
    return PowerLawModel{std::exp(log_alpha), omega};
}

inline double expected_reward(const PowerLawModel& model, double cost) {
    if (cost <= 0.0) {
        return 0.0;
    }
    return model.alpha * std::pow(cost, model.omega);
}

// Normal(budget, sigma^2) truncated to [0, 2 * budget], by rejection. The
// proposal is the normal itself when sigma <= budget and a uniform on the
// interval otherwise; both accept with probability above one half.
template <typename Rng>
double sample_cost(double budget, double sigma, Rng& rng) {
    if (budget <= 0.0 || sigma <= 0.0) {
        return std::max(budget, 0.0);
    }
    const double hi = 2.0 * budget;
    if (sigma <= budget) {
        while (true) {
            const double x = budget + sigma * standard_normal(rng);
            if (x >= 0.0 && x <= hi) {
                return x;
            }
        }
    }
    while (true) {
        const double x = hi * uniform01(rng);
        const double z = (x - budget) / sigma;
        if (uniform01(rng) < std::exp(-0.5 * z * z)) {
            return x;
        }
    }
}

// alpha * cost^omega + eps with eps ~ Normal(0, noise_std^2), clamped at 0.
template <typename Rng>
double realize_reward(const PowerLawModel& model, double cost, double noise_std, Rng& rng) {
    const double eps = noise_std > 0.0 ? noise_std * standard_normal(rng) : 0.0;
    return std::max(0.0, expected_reward(model, cost) + eps);
}

// Group spend in one calendar month divided by the days in that month.
inline double daily_budget_cap(std::span<const LoggedRecord> month_records) {
    if (month_records.empty()) {
        throw DataError("daily budget cap needs at least one record in the month");
    }
    const Date first = month_records.front().date;
    double total = 0.0;
    for (const auto& r : month_records) {
        if (r.date.year != first.year || r.date.month != first.month) {
            throw DataError("daily_budget_cap given records from more than one month");
        }
        total += r.cost;
    }
    return total / static_cast<double>(first.days_in_month());
}

struct DayTotals {
    double cost = 0.0;
    double clicks = 0.0;
    double conversions = 0.0;
};

struct CampaignLog {
    std::string id;
    std::string channel;
    std::vector<std::optional<DayTotals>> days; // indexed by day offset from the group start
    double conversion_rate = 0.0;

    // Logged (cost, clicks) pairs for days in [first, last).
    std::vector<CostReward> points(std::size_t first, std::size_t last) const {
        std::vector<CostReward> out;
        last = std::min(last, days.size());
        for (std::size_t d = first; d < last; ++d) {
            if (days[d]) {
                out.push_back({days[d]->cost, days[d]->clicks});
            }
        }
        return out;
    }
};

// Logged records of one campaign group arranged by day, plus the daily cap
// schedule derived from monthly spend.
struct LoggedGroup {
    std::string group_id;
    Date start;
    std::size_t horizon = 0;
    std::vector<CampaignLog> campaigns;
    std::vector<double> daily_cap;

    std::size_t num_campaigns() const { return campaigns.size(); }

    // Uses the group named by group_id, or the first group in the file when empty.
    static LoggedGroup from_records(std::span<const LoggedRecord> records, const std::string& group_id = {}) {
        if (records.empty()) {
            throw DataError("no logged records");
        }
        LoggedGroup g;
        g.group_id = group_id.empty() ? records.front().group_id : group_id;
        std::vector<const LoggedRecord*> mine;
        for (const auto& r : records) {
            if (r.group_id == g.group_id) {
                mine.push_back(&r);
            }
        }
        if (mine.empty()) {
            throw DataError("no logged records for group '" + g.group_id + "'");
        }
        auto [lo, hi] = std::minmax_element(mine.begin(), mine.end(),
                                            [](const auto* a, const auto* b) { return a->date < b->date; });
        g.start = (*lo)->date;
        g.horizon = static_cast<std::size_t>((*hi)->date.serial() - g.start.serial() + 1);

        std::map<std::string, std::size_t> index;
        std::map<std::pair<int, unsigned>, std::vector<LoggedRecord>> by_month;
        for (const auto* r : mine) {
            auto [it, fresh] = index.try_emplace(r->sub_campaign_id, g.campaigns.size());
            if (fresh) {
                CampaignLog c;
                c.id = r->sub_campaign_id;
                c.channel = r->channel;
                c.days.resize(g.horizon);
                g.campaigns.push_back(std::move(c));
            }
            auto& slot = g.campaigns[it->second].days[static_cast<std::size_t>(r->date.serial() - g.start.serial())];
            if (!slot) {
                slot = DayTotals{};
            }
            slot->cost += r->cost;
            slot->clicks += static_cast<double>(r->clicks);
            slot->conversions += static_cast<double>(r->conversions);
            by_month[{r->date.year, r->date.month}].push_back(*r);
        }
        for (auto& c : g.campaigns) {
            double clicks = 0.0;
            double conversions = 0.0;
            for (const auto& d : c.days) {
                if (d) {
                    clicks += d->clicks;
                    conversions += d->conversions;
                }
            }
            c.conversion_rate = clicks > 0.0 ? conversions / clicks : 0.0;
        }
        g.daily_cap.resize(g.horizon);
        for (std::size_t d = 0; d < g.horizon; ++d) {
            const Date date = g.start.plus_days(static_cast<std::int64_t>(d));
            const auto it = by_month.find({date.year, date.month});
            if (it == by_month.end()) {
                throw DataError("no logged spend in month of " + date.to_string() + " to derive the daily cap");
            }
            g.daily_cap[d] = daily_budget_cap(it->second);
        }
        return g;
    }
};

struct EnvConfig {
    std::size_t stationary_period = 20;
    double cost_sigma_fraction = 0.25;
    double reward_noise_std = 0.1;
    double switch_threshold = 0.20;
    std::uint64_t seed = 1;
};

// Per sub-campaign ground-truth state.
struct CampaignPhaseState {
    PowerLawModel current;
    std::optional<PowerLawModel> future;
    std::size_t phase_index = 0;
    std::size_t phase_start = 0;
    std::vector<std::size_t> breakpoints;
    std::vector<CostReward> phase_points;
};

namespace detail {

inline double log_miss(const PowerLawModel& m, const CostReward& p) {
    return std::abs(std::log(p.reward) - std::log(expected_reward(m, p.cost)));
}

} // namespace detail

// Replace the current model by the future one when their alphas differ by
// more than `threshold` (relative to the current alpha) and at least
// `stationary_period` days have passed since the phase started.
//
// onset_points, when given, are the logged points of the first few days of
// the future window, starting with `day` itself. The switch then also waits
// until the future model explains both that first point and the run as a
// whole better than the current model, and until the current model misses
// those points by more than half the threshold on average (log scale). The
// breakpoint then lands on the onset of the change rather than when the
// lookahead window first sees it, and alpha moves that trade off against
// omega without changing the curve where the data lies are ignored.
inline bool maybe_switch_model(CampaignPhaseState& state, std::size_t day, std::size_t stationary_period,
                               double threshold = 0.20, std::span<const CostReward> onset_points = {}) {
    if (!state.future || day < state.phase_start + stationary_period) {
        return false;
    }
    const double gap = std::abs(state.current.alpha - state.future->alpha) / state.current.alpha;
    if (!(gap > threshold)) {
        return false;
    }
    if (!onset_points.empty()) {
        const auto& first = onset_points.front();
        if (!(first.cost > 0.0 && first.reward > 0.0)) {
            return false;
        }
        if (!(detail::log_miss(*state.future, first) < detail::log_miss(state.current, first))) {
            return false;
        }
        double miss_current = 0.0;
        double miss_future = 0.0;
        std::size_t used = 0;
        for (const auto& p : onset_points) {
            if (p.cost > 0.0 && p.reward > 0.0) {
                miss_current += detail::log_miss(state.current, p);
                miss_future += detail::log_miss(*state.future, p);
                ++used;
            }
        }
        if (!(miss_future < miss_current) ||
            !(miss_current > static_cast<double>(used) * std::log1p(0.5 * threshold))) {
            return false;
        }
    }
    state.current = *state.future;
    state.phase_start = day;
    state.breakpoints.push_back(day);
    ++state.phase_index;
    return true;
}

struct Observation {
    std::size_t campaign = 0;
    double budget = 0.0;
    double cost = 0.0;
    double reward = 0.0;
    double conversions = 0.0;
};

// Day-by-day simulator driven by a logged campaign group.
class Environment {
  public:
    // Simulation starts at logged day first_day; earlier days are history
    // (for example a policy warm start) and are never simulated.
    Environment(LoggedGroup logs, EnvConfig config, std::size_t first_day = 0)
        : logs_(std::move(logs)), config_(config), day_(first_day) {
        if (config_.stationary_period == 0) {
            throw ConfigError("stationary period must be at least one day");
        }
        if (first_day >= logs_.horizon) {
            throw ConfigError("simulation start day " + std::to_string(first_day) + " is past the logged horizon of " +
                              std::to_string(logs_.horizon) + " days");
        }
        if (!(config_.cost_sigma_fraction >= 0.0) || !(config_.reward_noise_std >= 0.0)) {
            throw ConfigError("environment noise levels must be nonnegative");
        }
        states_.resize(logs_.num_campaigns());
        for (std::size_t j = 0; j < states_.size(); ++j) {
            auto& s = states_[j];
            s.phase_start = first_day;
            s.phase_points = logs_.campaigns[j].points(first_day, first_day + config_.stationary_period);
            try {
                s.current = fit_power_law(s.phase_points);
            } catch (const InsufficientData& e) {
                throw DataError("sub-campaign '" + logs_.campaigns[j].id +
                                "' has too little logged data in its first stationary period: " + e.what());
            }
        }
    }

    std::size_t num_campaigns() const { return states_.size(); }
    std::size_t day() const { return day_; }
    std::size_t horizon() const { return logs_.horizon; }
    bool done() const { return day_ >= logs_.horizon; }
    const LoggedGroup& logs() const { return logs_; }
    const EnvConfig& config() const { return config_; }
    double daily_cap(std::size_t d) const { return logs_.daily_cap.at(d); }
    double daily_cap() const { return daily_cap(day_); }
    const CampaignPhaseState& campaign(std::size_t j) const { return states_.at(j); }
    const PowerLawModel& current_model(std::size_t j) const { return states_.at(j).current; }

    std::vector<PowerLawModel> current_models() const {
        std::vector<PowerLawModel> out;
        for (const auto& s : states_) {
            out.push_back(s.current);
        }
        return out;
    }

    // Realize today's costs and rewards for the given budgets, then refit the
    // models and check for a switch ahead of tomorrow.
    std::vector<Observation> step(std::span<const double> budgets) {
        if (done()) {
            throw HorizonExceeded("environment stepped past its horizon of " + std::to_string(horizon()) + " days");
        }
        if (budgets.size() != states_.size()) {
            throw ConfigError("allocation has " + std::to_string(budgets.size()) + " budgets for " +
                              std::to_string(states_.size()) + " sub-campaigns");
        }
        std::vector<Observation> obs;
        obs.reserve(states_.size());
        for (std::size_t j = 0; j < states_.size(); ++j) {
            const double budget = budgets[j];
            if (!(budget >= 0.0) || !std::isfinite(budget)) {
                throw ConfigError("budgets must be finite and nonnegative");
            }
            auto& s = states_[j];
            auto rng = make_stream(config_.seed, Stream::Environment, j, day_);
            const double cost = sample_cost(budget, config_.cost_sigma_fraction * budget, rng);
            const double reward = realize_reward(s.current, cost, config_.reward_noise_std, rng);
            obs.push_back({j, budget, cost, reward, reward * logs_.campaigns[j].conversion_rate});

            s.phase_points.push_back({cost, reward});
            try {
                s.current = fit_power_law(s.phase_points);
            } catch (const InsufficientData&) {
                // keep the previous model until the phase has enough usable points
            }
        }
        ++day_;
        if (!done()) {
            prepare_switches();
        }
        return obs;
    }

  private:
    // The lookahead needs a full stationary period of logs; near the end of
    // the horizon switching is off.
    void prepare_switches() {
        const std::size_t tp = config_.stationary_period;
        const std::size_t onset_days = std::max<std::size_t>(1, tp / 4);
        for (std::size_t j = 0; j < states_.size(); ++j) {
            auto& s = states_[j];
            const auto& log = logs_.campaigns[j];
            s.future.reset();
            if (day_ + tp > logs_.horizon || !log.days[day_]) {
                continue;
            }
            auto window = log.points(day_, day_ + tp);
            try {
                s.future = fit_power_law(window);
            } catch (const InsufficientData&) {
                continue;
            }
            const auto onset = log.points(day_, day_ + onset_days);
            if (maybe_switch_model(s, day_, tp, config_.switch_threshold, onset)) {
                s.phase_points = std::move(window);
            }
        }
    }

    LoggedGroup logs_;
    EnvConfig config_;
    std::vector<CampaignPhaseState> states_;
    std::size_t day_ = 0;
};

} // namespace aba
