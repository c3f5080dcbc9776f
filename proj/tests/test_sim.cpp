#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "aba/datagen.hpp"
#include "aba/errors.hpp"
#include "aba/rng.hpp"
#include "aba/sim.hpp"

using namespace aba;

namespace {

LoggedRecord rec(Date d, std::string id, double cost, std::int64_t clicks = 1) {
    return {d, "G", std::move(id), "search", cost, clicks, 0};
}

ScenarioSpec jump_spec(std::uint64_t seed) {
    ScenarioSpec s;
    s.horizon_days = 100;
    s.tau = 4.0;
    s.seed = seed;
    CampaignSpec c;
    c.id = "C1";
    c.daily_spend = 50.0;
    c.phases = {{0, 2.0, 0.6}, {40, 3.0, 0.6}};
    s.campaigns = {c};
    return s;
}

} // namespace

TEST(PowerLaw, RoundTripNoiseFree) {
    std::vector<CostReward> pts;
    for (double c : {1.0, 4.0, 9.0, 16.0, 25.0}) {
        pts.push_back({c, 2.0 * std::sqrt(c)});
    }
    const auto m = fit_power_law(pts);
    EXPECT_NEAR(m.alpha, 2.0, 2e-3);
    EXPECT_NEAR(m.omega, 0.5, 5e-4);
}

TEST(PowerLaw, TooFewPoints) {
    const std::vector<CostReward> one{{3.0, 2.0}};
    EXPECT_THROW(fit_power_law(one), InsufficientData);
    const std::vector<CostReward> zeros{{0.0, 2.0}, {3.0, 0.0}, {4.0, 1.0}};
    EXPECT_THROW(fit_power_law(zeros), InsufficientData);
}

TEST(PowerLaw, SteepSlopeClampedToOne) {
    std::vector<CostReward> pts;
    for (double c : {1.0, 2.0, 4.0, 8.0}) {
        pts.push_back({c, 0.5 * std::pow(c, 1.3)});
    }
    const auto m = fit_power_law(pts);
    EXPECT_EQ(m.omega, 1.0);
    EXPECT_GT(m.alpha, 0.0);
}

TEST(PowerLaw, ExpectedRewardShape) {
    EXPECT_DOUBLE_EQ(expected_reward({2.0, 0.5}, 4.0), 4.0);
    EXPECT_EQ(expected_reward({3.0, 0.7}, 0.0), 0.0);
    for (double omega : {1e-3, 0.1, 0.5, 0.9, 1.0}) {
        const PowerLawModel m{1.7, omega};
        double prev = -1.0;
        for (int i = 0; i <= 100; ++i) {
            const double x = 0.5 * i;
            const double v = expected_reward(m, x);
            EXPECT_GE(v, prev);
            prev = v;
            if (i >= 2) {
                const double d2 = v - 2 * expected_reward(m, x - 0.5) + expected_reward(m, x - 1.0);
                EXPECT_LE(d2, 1e-9) << "omega " << omega << " x " << x;
            }
        }
    }
}

TEST(Noise, SampleCostContract) {
    auto rng = make_stream(1, Stream::Environment, 0, 0);
    EXPECT_EQ(sample_cost(7.5, 0.0, rng), 7.5);
    EXPECT_EQ(sample_cost(0.0, 3.0, rng), 0.0);
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        auto r = make_stream(seed, Stream::Environment, 1, 2);
        for (double sigma : {0.1, 2.0, 10.0, 80.0}) {
            const double x = sample_cost(10.0, sigma, r);
            EXPECT_GE(x, 0.0);
            EXPECT_LE(x, 20.0);
        }
    }
}

TEST(Noise, RealizeReward) {
    auto rng = make_stream(1, Stream::Environment, 0, 0);
    EXPECT_DOUBLE_EQ(realize_reward({2.0, 0.5}, 4.0, 0.0, rng), 4.0);
    EXPECT_DOUBLE_EQ(realize_reward({1.0, 1.0}, 3.0, 0.0, rng), 3.0);
    int clamped = 0;
    for (std::uint64_t d = 0; d < 100; ++d) {
        auto r = make_stream(3, Stream::Environment, 0, d);
        const double v = realize_reward({1.0, 0.5}, 0.0, 0.1, r);
        EXPECT_GE(v, 0.0);
        clamped += v == 0.0;
    }
    EXPECT_GT(clamped, 20);
}

TEST(Cap, MonthlySpendOverDays) {
    std::vector<LoggedRecord> sep;
    for (int d = 1; d <= 30; ++d) {
        sep.push_back(rec({2023, 9, unsigned(d)}, "A", 100.0));
    }
    EXPECT_DOUBLE_EQ(daily_budget_cap(sep), 100.0);
    const std::vector<LoggedRecord> one{rec({2024, 1, 5}, "A", 31.0)};
    EXPECT_DOUBLE_EQ(daily_budget_cap(one), 1.0);
    EXPECT_THROW(daily_budget_cap(std::span<const LoggedRecord>{}), DataError);
}

TEST(Cap, ScheduleIsPiecewiseConstantPerMonth) {
    // Jan 2024: 31 days, Feb 2024: 29 days (leap), Mar 2024: 31 days
    std::vector<LoggedRecord> r;
    for (int d = 0; d < 91; ++d) {
        const Date date = Date{2024, 1, 1}.plus_days(d);
        r.push_back(rec(date, "A", 10.0 + d % 3));
        r.push_back(rec(date, "B", 5.0));
    }
    const auto g = LoggedGroup::from_records(r);
    ASSERT_EQ(g.horizon, 91u);
    // hand sums: A cycles 10,11,12 from day 0
    const double jan = (10 * 11 + 11 * 10 + 12 * 10) + 5.0 * 31;  // days 0..30
    const double feb = (10 * 9 + 11 * 10 + 12 * 10) + 5.0 * 29;   // days 31..59
    const double mar = (10 * 11 + 11 * 10 + 12 * 10) + 5.0 * 31;  // days 60..90
    EXPECT_DOUBLE_EQ(g.daily_cap[0], jan / 31);
    EXPECT_DOUBLE_EQ(g.daily_cap[30], jan / 31);
    EXPECT_DOUBLE_EQ(g.daily_cap[31], feb / 29);
    EXPECT_DOUBLE_EQ(g.daily_cap[59], feb / 29);
    EXPECT_DOUBLE_EQ(g.daily_cap[60], mar / 31);
    EXPECT_DOUBLE_EQ(g.daily_cap[90], mar / 31);
}

TEST(Switch, ThresholdAndCooldown) {
    CampaignPhaseState s;
    s.current = {10.0, 0.5};
    s.future = PowerLawModel{10.5, 0.5};
    EXPECT_FALSE(maybe_switch_model(s, 30, 20));
    s.future = PowerLawModel{13.0, 0.5};
    EXPECT_FALSE(maybe_switch_model(s, 19, 20));
    EXPECT_TRUE(maybe_switch_model(s, 20, 20));
    EXPECT_EQ(s.current.alpha, 13.0);
    EXPECT_EQ(s.phase_index, 1u);
    EXPECT_EQ(s.breakpoints, (std::vector<std::size_t>{20}));
    s.future = PowerLawModel{30.0, 0.5};
    EXPECT_FALSE(maybe_switch_model(s, 39, 20));
    EXPECT_TRUE(maybe_switch_model(s, 40, 20));
}

TEST(Switch, OnsetPointsGateTheSwitch) {
    CampaignPhaseState s;
    s.current = {2.0, 0.6};
    s.future = PowerLawModel{3.0, 0.6};
    // data still on the old curve: no switch
    const std::vector<CostReward> old_curve{{50.0, expected_reward({2.0, 0.6}, 50.0)},
                                            {40.0, expected_reward({2.0, 0.6}, 40.0)}};
    EXPECT_FALSE(maybe_switch_model(s, 30, 20, 0.2, old_curve));
    // first day old, rest new: wait for the onset
    std::vector<CostReward> mixed{old_curve[0], {40.0, expected_reward({3.0, 0.6}, 40.0)},
                                  {45.0, expected_reward({3.0, 0.6}, 45.0)}};
    EXPECT_FALSE(maybe_switch_model(s, 30, 20, 0.2, mixed));
    mixed.erase(mixed.begin());
    EXPECT_TRUE(maybe_switch_model(s, 31, 20, 0.2, mixed));
    EXPECT_EQ(s.breakpoints, (std::vector<std::size_t>{31}));
}

TEST(Switch, OmegaDriftAloneNeverSwitches) {
    CampaignPhaseState s;
    s.current = {10.0, 0.9};
    s.future = PowerLawModel{10.0, 0.2};
    EXPECT_FALSE(maybe_switch_model(s, 100, 20));
}

TEST(Environment, DeterministicSettingsGiveExpectedRewards) {
    const auto g = LoggedGroup::from_records(generate_logged_campaign(jump_spec(3)));
    EnvConfig cfg;
    cfg.cost_sigma_fraction = 0.0;
    cfg.reward_noise_std = 0.0;
    Environment env(g, cfg);
    const std::vector<double> budgets{37.0};
    const auto truth = env.current_model(0);
    const auto obs = env.step(budgets);
    ASSERT_EQ(obs.size(), 1u);
    EXPECT_EQ(obs[0].cost, 37.0);
    EXPECT_DOUBLE_EQ(obs[0].reward, expected_reward(truth, 37.0));
}

TEST(Environment, FullRunBookkeeping) {
    const auto g = LoggedGroup::from_records(generate_logged_campaign(jump_spec(4)));
    Environment env(g, EnvConfig{});
    std::size_t count = 0;
    while (!env.done()) {
        const std::vector<double> b{40.0};
        for (const auto& o : env.step(b)) {
            EXPECT_GE(o.cost, 0.0);
            EXPECT_LE(o.cost, 80.0);
            EXPECT_GE(o.reward, 0.0);
            ++count;
        }
    }
    EXPECT_EQ(count, g.horizon * g.num_campaigns());
    const std::vector<double> b{40.0};
    EXPECT_THROW(env.step(b), HorizonExceeded);
}

TEST(Environment, PlantedJumpGivesOneBreakpoint) {
    for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
        const auto g = LoggedGroup::from_records(generate_logged_campaign(jump_spec(seed)));
        EnvConfig cfg;
        cfg.seed = seed;
        Environment env(g, cfg);
        while (!env.done()) {
            const std::vector<double> b{50.0};
            env.step(b);
        }
        const auto& bp = env.campaign(0).breakpoints;
        ASSERT_EQ(bp.size(), 1u) << "seed " << seed;
        EXPECT_GE(bp[0], 40u);
        EXPECT_LE(bp[0], 60u);
        EXPECT_NEAR(env.current_model(0).alpha / env.campaign(0).current.alpha, 1.0, 1e-12);
    }
}

TEST(Environment, BreakpointsRespectStationaryPeriod) {
    ScenarioSpec s = jump_spec(9);
    s.horizon_days = 200;
    s.campaigns[0].phases = {{0, 2.0, 0.6}, {40, 3.2, 0.6}, {60, 1.6, 0.6}, {100, 3.0, 0.6}, {150, 1.5, 0.6}};
    const auto g = LoggedGroup::from_records(generate_logged_campaign(s));
    Environment env(g, EnvConfig{});
    while (!env.done()) {
        const std::vector<double> b{50.0};
        env.step(b);
    }
    const auto& bp = env.campaign(0).breakpoints;
    EXPECT_GE(bp.size(), 3u);
    for (std::size_t i = 1; i < bp.size(); ++i) {
        EXPECT_GE(bp[i] - bp[i - 1], 20u);
    }
}

TEST(Environment, SameSeedSameStream) {
    const auto g = LoggedGroup::from_records(generate_logged_campaign(jump_spec(6)));
    EnvConfig cfg;
    cfg.seed = 77;
    Environment a(g, cfg), b(g, cfg);
    while (!a.done()) {
        const std::vector<double> budgets{45.0};
        const auto x = a.step(budgets);
        const auto y = b.step(budgets);
        EXPECT_EQ(x[0].cost, y[0].cost);
        EXPECT_EQ(x[0].reward, y[0].reward);
    }
}

TEST(Environment, RejectsBadInput) {
    const auto g = LoggedGroup::from_records(generate_logged_campaign(jump_spec(6)));
    EXPECT_THROW(Environment(g, EnvConfig{}, g.horizon), ConfigError);
    Environment env(g, EnvConfig{});
    const std::vector<double> two{1.0, 2.0};
    EXPECT_THROW(env.step(two), ConfigError);
    const std::vector<double> neg{-1.0};
    EXPECT_THROW(env.step(neg), ConfigError);
}
