#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "aba/errors.hpp"
#include "aba/logged_data.hpp"
#include "aba/rng.hpp"
#include "aba/sim.hpp"

namespace aba {

struct PhaseSpec {
    std::size_t start_day = 0;
    double alpha = 1.0;
    double omega = 0.5;

    PowerLawModel model() const { return {alpha, omega}; }
};

struct CampaignSpec {
    std::string id;
    std::string channel = "search";
    double daily_spend = 100.0; // centre of the operator's budget walk
    double conversion_rate = 0.05;
    std::vector<PhaseSpec> phases;
};

// Synthetic campaign group with piecewise-stationary power-law curves.
struct ScenarioSpec {
    std::string group_id = "G1";
    Date start_date{2024, 1, 1};
    std::size_t horizon_days = 300;
    std::size_t stationary_period = 20;
    double tau = 4.0;
    std::vector<CampaignSpec> campaigns;
    double cost_sigma_fraction = 0.25;
    double reward_noise_std = 0.1;
    double budget_walk_std = 0.05; // per-day step, as a fraction of daily_spend
    double budget_walk_clip = 0.5; // walk stays within daily_spend * (1 +- clip)
    std::uint64_t seed = 1;

    // Budget at which adjacent phases must differ by at least tau.
    double cap_budget() const {
        double total = 0.0;
        for (const auto& c : campaigns) {
            total += c.daily_spend;
        }
        return total;
    }

    void validate() const {
        if (campaigns.empty()) {
            throw ConfigError("scenario needs at least one campaign");
        }
        if (horizon_days == 0) {
            throw ConfigError("scenario horizon must be positive");
        }
        if (!(cost_sigma_fraction >= 0.0) || !(reward_noise_std >= 0.0) || !(budget_walk_std >= 0.0) ||
            !(budget_walk_clip >= 0.0 && budget_walk_clip <= 1.0)) {
            throw ConfigError("scenario noise parameters out of range");
        }
        std::set<std::string> ids;
        const double cap = cap_budget();
        for (const auto& c : campaigns) {
            if (c.id.empty() || !ids.insert(c.id).second) {
                throw ConfigError("campaign ids must be nonempty and unique");
            }
            if (c.id.find(',') != std::string::npos || c.channel.find(',') != std::string::npos ||
                group_id.find(',') != std::string::npos) {
                throw ConfigError("ids and channels may not contain commas");
            }
            if (!(c.daily_spend > 0.0) || !(c.conversion_rate >= 0.0 && c.conversion_rate <= 1.0)) {
                throw ConfigError("campaign '" + c.id + "' needs daily_spend > 0 and conversion_rate in [0, 1]");
            }
            if (c.phases.empty() || c.phases.front().start_day != 0) {
                throw ConfigError("campaign '" + c.id + "' must have a phase starting at day 0");
            }
            for (std::size_t p = 0; p < c.phases.size(); ++p) {
                c.phases[p].model().validate();
                if (p == 0) {
                    continue;
                }
                const auto& prev = c.phases[p - 1];
                const auto& cur = c.phases[p];
                if (cur.start_day <= prev.start_day || cur.start_day - prev.start_day < stationary_period) {
                    throw ConfigError("campaign '" + c.id + "' phase starts must increase by at least " +
                                      std::to_string(stationary_period) + " days");
                }
                const double gap = std::abs(expected_reward(cur.model(), cap) - expected_reward(prev.model(), cap));
                if (gap < tau) {
                    throw ConfigError("campaign '" + c.id + "' phases " + std::to_string(p - 1) + " and " +
                                      std::to_string(p) + " differ by " + std::to_string(gap) +
                                      " at the cap, below tau");
                }
            }
        }
    }

    const PhaseSpec& active_phase(const CampaignSpec& c, std::size_t day) const {
        const PhaseSpec* active = &c.phases.front();
        for (const auto& p : c.phases) {
            if (p.start_day <= day) {
                active = &p;
            }
        }
        return *active;
    }
};

namespace detail {

template <typename Rng>
std::int64_t binomial(std::int64_t trials, double p, Rng& rng) {
    std::int64_t hits = 0;
    for (std::int64_t i = 0; i < trials; ++i) {
        if (uniform01(rng) < p) {
            ++hits;
        }
    }
    return hits;
}

} // namespace detail

// Operator budgets follow a clipped Gaussian walk around each campaign's
// daily spend; costs and clicks come from the simulator's own noise model.
inline std::vector<LoggedRecord> generate_logged_campaign(const ScenarioSpec& spec) {
    spec.validate();
    std::vector<LoggedRecord> out;
    out.reserve(spec.horizon_days * spec.campaigns.size());
    std::vector<double> budget(spec.campaigns.size());
    for (std::size_t j = 0; j < spec.campaigns.size(); ++j) {
        budget[j] = spec.campaigns[j].daily_spend;
    }
    for (std::size_t d = 0; d < spec.horizon_days; ++d) {
        const Date date = spec.start_date.plus_days(static_cast<std::int64_t>(d));
        for (std::size_t j = 0; j < spec.campaigns.size(); ++j) {
            const auto& c = spec.campaigns[j];
            auto rng = make_stream(spec.seed, Stream::Datagen, j, d);
            if (d > 0) {
                const double lo = c.daily_spend * (1.0 - spec.budget_walk_clip);
                const double hi = c.daily_spend * (1.0 + spec.budget_walk_clip);
                budget[j] = std::clamp(budget[j] + spec.budget_walk_std * c.daily_spend * standard_normal(rng), lo, hi);
            }
            const double cost = sample_cost(budget[j], spec.cost_sigma_fraction * budget[j], rng);
            const double reward = realize_reward(spec.active_phase(c, d).model(), cost, spec.reward_noise_std, rng);
            const auto clicks = static_cast<std::int64_t>(std::llround(reward));
            LoggedRecord r;
            r.date = date;
            r.group_id = spec.group_id;
            r.sub_campaign_id = c.id;
            r.channel = c.channel;
            r.cost = cost;
            r.clicks = clicks;
            r.conversions = detail::binomial(clicks, c.conversion_rate, rng);
            out.push_back(std::move(r));
        }
    }
    return out;
}

// Column mapping for attribution logs with one row per impression. Defaults
// follow the public Criteo attribution dataset: timestamp in seconds from the
// start of the collection, campaign id, 0/1 click and conversion flags, and a
// per-impression cost.
struct CriteoMapping {
    char separator = 0; // 0 = detect from the header (tab, else comma)
    std::string timestamp_column = "timestamp";
    std::string campaign_column = "campaign";
    std::string cost_column = "cost";
    std::string click_column = "click";
    std::string conversion_column = "conversion";
    double seconds_per_day = 86400.0;
    Date base_date{2017, 1, 1};
    std::string group_id = "criteo";
    std::string channel = "display";
};

struct CriteoLoad {
    std::vector<LoggedRecord> records;
    std::vector<std::string> warnings;
};

// Filters an attribution log to the given campaign ids and aggregates it to
// one record per (calendar day, campaign). If none of the ids occur the
// result is empty with a warning; if only some occur, that is an error.
inline CriteoLoad load_criteo(const std::string& path, const std::vector<std::string>& campaign_ids,
                              const CriteoMapping& mapping = {}) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open attribution log '" + path + "'");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError("attribution log '" + path + "' is empty", 1);
    }
    std::string_view header = detail::chomp(line);
    const char sep = mapping.separator ? mapping.separator : (header.find('\t') != std::string_view::npos ? '\t' : ',');
    const auto names = detail::split(header, sep);
    auto column = [&](const std::string& name) {
        const auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) {
            throw DataError("attribution log has no column '" + name + "'", 1);
        }
        return static_cast<std::size_t>(it - names.begin());
    };
    const std::size_t c_time = column(mapping.timestamp_column);
    const std::size_t c_campaign = column(mapping.campaign_column);
    const std::size_t c_cost = column(mapping.cost_column);
    const std::size_t c_click = column(mapping.click_column);
    const std::size_t c_conv = column(mapping.conversion_column);

    const std::set<std::string> wanted(campaign_ids.begin(), campaign_ids.end());
    std::map<std::pair<std::int64_t, std::string>, DayTotals> totals;
    std::set<std::string> seen;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        const auto text = detail::chomp(line);
        if (text.empty()) {
            continue;
        }
        const auto f = detail::split(text, sep);
        if (f.size() != names.size()) {
            throw DataError("expected " + std::to_string(names.size()) + " fields, found " + std::to_string(f.size()),
                            row);
        }
        const std::string id(f[c_campaign]);
        if (!wanted.count(id)) {
            continue;
        }
        seen.insert(id);
        const double ts = detail::parse_double(f[c_time], mapping.timestamp_column, row);
        if (!(ts >= 0.0)) {
            throw DataError("negative timestamp", row);
        }
        auto& t = totals[{static_cast<std::int64_t>(std::floor(ts / mapping.seconds_per_day)), id}];
        t.cost += detail::parse_double(f[c_cost], mapping.cost_column, row);
        t.clicks += detail::parse_double(f[c_click], mapping.click_column, row);
        t.conversions += detail::parse_double(f[c_conv], mapping.conversion_column, row);
    }

    CriteoLoad result;
    if (seen.empty()) {
        result.warnings.push_back("none of the requested campaign ids occur in '" + path + "'");
        return result;
    }
    for (const auto& id : campaign_ids) {
        if (!seen.count(id)) {
            throw DataError("campaign id '" + id + "' not found in '" + path + "'");
        }
    }
    for (const auto& [key, t] : totals) {
        LoggedRecord r;
        r.date = mapping.base_date.plus_days(key.first);
        r.group_id = mapping.group_id;
        r.sub_campaign_id = key.second;
        r.channel = mapping.channel;
        r.cost = t.cost;
        r.clicks = std::llround(t.clicks);
        r.conversions = std::llround(t.conversions);
        result.records.push_back(std::move(r));
    }
    return result;
}

} // namespace aba
