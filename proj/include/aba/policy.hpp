#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "aba/errors.hpp"
#include "aba/gp.hpp"
#include "aba/grid.hpp"
#include "aba/knapsack.hpp"
#include "aba/rng.hpp"
#include "aba/sim.hpp"

namespace aba {

enum class Variant { TUCB_MAE, UCB_MAE, UCB_NCPD, UCB_SW, TS_SW, UCB_DS };

inline constexpr Variant kAllVariants[] = {Variant::TUCB_MAE, Variant::UCB_MAE, Variant::UCB_NCPD,
                                           Variant::UCB_SW,   Variant::TS_SW,   Variant::UCB_DS};

inline std::string_view to_string(Variant v) {
    switch (v) {
    case Variant::TUCB_MAE: return "TUCB-MAE";
    case Variant::UCB_MAE: return "UCB-MAE";
    case Variant::UCB_NCPD: return "UCB-NCPD";
    case Variant::UCB_SW: return "UCB-SW";
    case Variant::TS_SW: return "TS-SW";
    case Variant::UCB_DS: return "UCB-DS";
    }
    return "?";
}

// Accepts "TUCB-MAE", "tucb_mae", "TUCBMAE" and similar spellings.
inline Variant parse_variant(std::string_view text) {
    std::string key;
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            key.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
        }
    }
    for (Variant v : kAllVariants) {
        std::string name;
        for (char c : to_string(v)) {
            if (c != '-') {
                name.push_back(c);
            }
        }
        if (key == name) {
            return v;
        }
    }
    throw ConfigError("unknown policy variant '" + std::string(text) + "'");
}

enum class EfficiencyMetric { CPC, CPA };

struct PolicyConfig {
    Variant variant = Variant::TUCB_MAE;
    double beta = 2.0;
    double tau = 4.0;
    std::size_t window_length = 7;
    std::size_t sliding_window = 10;
    double discount = 0.9;
    EfficiencyMetric efficiency_metric = EfficiencyMetric::CPC;
    // Ablation switches; only read under TUCB_MAE.
    bool use_saturating_mean = true;
    bool use_targeted_ucb = true;
    bool use_efficiency = true;
    gp::RbfKernelParams kernel{};
    double noise_variance = 0.01;

    void validate() const {
        if (!(beta >= 0.0)) {
            throw ConfigError("beta must be nonnegative");
        }
        if (!(tau > 0.0)) {
            throw ConfigError("tau must be positive");
        }
        if (window_length == 0 || sliding_window == 0) {
            throw ConfigError("window lengths must be positive");
        }
        if (!(discount > 0.0 && discount <= 1.0)) {
            throw ConfigError("discount must lie in (0, 1]");
        }
        if (!(noise_variance >= 0.0)) {
            throw ConfigError("GP noise variance must be nonnegative");
        }
        kernel.validate();
    }

    bool tucb() const { return variant == Variant::TUCB_MAE; }
    bool saturates() const { return tucb() && use_saturating_mean; }
    bool targeted() const { return tucb() && use_targeted_ucb; }
    bool efficiency_weighted() const { return tucb() && use_efficiency; }
    bool detects_changes() const { return variant == Variant::TUCB_MAE || variant == Variant::UCB_MAE; }
    bool windowed() const { return variant == Variant::UCB_SW || variant == Variant::TS_SW; }
};

struct BufferEntry {
    std::size_t day = 0;
    double budget = 0.0;
    double cost = 0.0;
    double reward = 0.0;
    double conversions = 0.0;
};

// theta_j = ratio_j / max_k ratio_k with ratio_j the sum over days of
// cost / outcome (clicks for CPC, conversions for CPA), skipping days without
// outcomes. A campaign with no such day gets theta = 1.
inline std::vector<double> compute_efficiency(std::span<const std::vector<BufferEntry>> histories,
                                              EfficiencyMetric metric = EfficiencyMetric::CPC) {
    std::vector<std::optional<double>> ratio(histories.size());
    double top = 0.0;
    for (std::size_t j = 0; j < histories.size(); ++j) {
        for (const auto& e : histories[j]) {
            const double outcome = metric == EfficiencyMetric::CPC ? e.reward : e.conversions;
            if (outcome > 0.0) {
                ratio[j] = ratio[j].value_or(0.0) + e.cost / outcome;
            }
        }
        if (ratio[j]) {
            top = std::max(top, *ratio[j]);
        }
    }
    std::vector<double> theta(histories.size(), 1.0);
    for (std::size_t j = 0; j < histories.size(); ++j) {
        if (ratio[j]) {
            theta[j] = top > 0.0 ? *ratio[j] / top : 0.0;
        }
    }
    return theta;
}

// means[i] + beta * (1 - theta) * stds[i], where the bonus is restricted to
// levels above b_max when `targeted` is set and a best budget is known.
inline std::vector<double> acquisition(std::span<const double> means, std::span<const double> stds, double theta,
                                       double beta, std::optional<double> b_max, const BudgetGrid& grid,
                                       bool targeted) {
    std::vector<double> out(means.begin(), means.end());
    const double scale = beta * (1.0 - theta);
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!targeted || !b_max || grid[i] > *b_max) {
            out[i] += scale * stds[i];
        }
    }
    return out;
}

// One joint draw from the posterior over the grid.
template <typename Rng>
std::vector<double> ts_sample(const gp::GpPosterior& post, const BudgetGrid& grid, Rng& rng) {
    const auto pred = post.predict(grid);
    const Eigen::MatrixXd cov = post.covariance(grid.values());
    Eigen::LLT<Eigen::MatrixXd> llt;
    gp::cholesky_with_jitter(cov, post.kernel().signal_variance, llt);
    const auto h = static_cast<Eigen::Index>(grid.size());
    Eigen::VectorXd z(h);
    for (Eigen::Index i = 0; i < h; ++i) {
        z[i] = standard_normal(rng);
    }
    const Eigen::VectorXd draw = llt.matrixL() * z;
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = pred.means[i] + draw[static_cast<Eigen::Index>(i)];
    }
    return out;
}

struct DualModels {
    gp::GpPosterior long_model;
    gp::GpPosterior short_model;
};

// (1/H) * sum_i |a_i - b_i|
inline double mean_absolute_gap(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.empty()) {
        throw ConfigError("mean_absolute_gap: series must be nonempty and of equal length");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += std::abs(a[i] - b[i]);
    }
    return acc / static_cast<double>(a.size());
}

// Mean absolute gap between the two models' predictive means over the grid.
inline double prediction_gap(const DualModels& models, const BudgetGrid& grid) {
    return mean_absolute_gap(models.long_model.predict_means(grid.values()),
                             models.short_model.predict_means(grid.values()));
}

// Strict: a gap equal to tau is not a change.
inline bool detect_changepoint(std::span<const double> long_means, std::span<const double> short_means, double tau) {
    return mean_absolute_gap(long_means, short_means) > tau;
}

inline bool detect_changepoint(const DualModels& models, const BudgetGrid& grid, double tau) {
    return prediction_gap(models, grid) > tau;
}

struct CampaignDiagnostics {
    std::vector<double> means;
    std::vector<double> stds;
    std::vector<double> acquisition;
    std::optional<double> b_max;
    double theta = 1.0;
    bool changepoint = false;
    std::size_t training_points = 0;
};

struct DayDecision {
    Allocation allocation;
    std::vector<CampaignDiagnostics> campaigns;
};

// Daily allocate-observe loop shared by TUCB-MAE and the baselines.
class Policy {
  public:
    Policy(PolicyConfig config, std::size_t num_campaigns, std::uint64_t seed)
        : config_(std::move(config)), seed_(seed), buffers_(num_campaigns), histories_(num_campaigns),
          detections_(num_campaigns) {
        config_.validate();
        if (num_campaigns == 0) {
            throw ConfigError("policy needs at least one sub-campaign");
        }
    }

    const PolicyConfig& config() const { return config_; }
    std::size_t num_campaigns() const { return buffers_.size(); }
    const std::vector<BufferEntry>& buffer(std::size_t j) const { return buffers_.at(j); }
    const std::vector<BufferEntry>& history(std::size_t j) const { return histories_.at(j); }
    const std::vector<std::size_t>& detections(std::size_t j) const { return detections_.at(j); }

    // Initial data for one campaign, e.g. the operator's recent logged days.
    void warm_start(std::size_t j, std::span<const BufferEntry> entries) {
        for (const auto& e : entries) {
            append(j, e);
        }
    }

    void observe(std::size_t day, std::span<const Observation> observations) {
        for (const auto& o : observations) {
            append(o.campaign, {day, o.budget, o.cost, o.reward, o.conversions});
        }
    }

    // One day of the loop: take yesterday's observations, refit, run change
    // detection, build acquisition values and solve the knapsack.
    DayDecision allocate_day(std::size_t day, const BudgetGrid& grid, double cap,
                             std::span<const Observation> prior_observations = {}) {
        if (!prior_observations.empty()) {
            observe(day == 0 ? 0 : day - 1, prior_observations);
        }
        const std::size_t n = num_campaigns();
        std::vector<double> theta(n, 0.0);
        if (config_.efficiency_weighted()) {
            theta = compute_efficiency(histories_, config_.efficiency_metric);
        }

        DayDecision decision;
        decision.campaigns.resize(n);
        RewardTable table(n);
        for (std::size_t j = 0; j < n; ++j) {
            auto& diag = decision.campaigns[j];
            diag.theta = theta[j];
            gp::GpPosterior model = fit_model(j, day, grid);
            if (config_.detects_changes()) {
                diag.changepoint = check_changepoint(j, day, grid, model);
            }
            diag.training_points = model.size();
            auto pred = model.predict(grid);
            diag.stds = std::move(pred.stds);
            diag.means = std::move(pred.means);

            std::optional<double> b_max;
            double n_max = 0.0;
            if (config_.tucb() && !model.empty()) {
                const auto inputs = model.inputs();
                double best_mean = -std::numeric_limits<double>::infinity();
                double best_cost = inputs.front();
                for (double c : inputs) {
                    const double m = model.mean_at(c);
                    if (m > best_mean) {
                        best_mean = m;
                        best_cost = c;
                    }
                }
                const std::size_t idx = grid.nearest_index(best_cost);
                b_max = grid[idx];
                n_max = diag.means[idx];
            }
            diag.b_max = b_max;

            const std::vector<double> base =
                config_.saturates() ? gp::saturate_mean(diag.means, grid, b_max, n_max) : diag.means;
            if (config_.variant == Variant::TS_SW) {
                auto rng = make_stream(seed_, Stream::Policy, j, day);
                diag.acquisition = ts_sample(model, grid, rng);
            } else {
                diag.acquisition = acquisition(base, diag.stds, theta[j], config_.beta, b_max, grid, config_.targeted());
            }
            table[j] = diag.acquisition;
        }
        decision.allocation = solve_mck(table, grid, cap);
        return decision;
    }

  private:
    void append(std::size_t j, const BufferEntry& e) {
        buffers_.at(j).push_back(e);
        histories_.at(j).push_back(e);
    }

    gp::GpDataset dataset(std::span<const BufferEntry> entries) const {
        gp::GpDataset data;
        data.noise_variance = config_.noise_variance;
        for (const auto& e : entries) {
            data.inputs.push_back(e.cost);
            data.targets.push_back(e.reward);
        }
        return data;
    }

    gp::GpPosterior fit_from(std::span<const BufferEntry> entries, const BudgetGrid& grid) const {
        return gp::fit(dataset(entries), config_.kernel, input_scale(grid));
    }

    static double input_scale(const BudgetGrid& grid) { return grid.max() > 0.0 ? grid.max() : 1.0; }

    gp::GpPosterior fit_model(std::size_t j, std::size_t day, const BudgetGrid& grid) const {
        std::span<const BufferEntry> entries = buffers_[j];
        if (config_.windowed() && entries.size() > config_.sliding_window) {
            entries = entries.last(config_.sliding_window);
        }
        if (config_.variant == Variant::UCB_DS) {
            auto data = dataset(entries);
            const std::size_t newest = entries.empty() ? day : entries.back().day;
            for (const auto& e : entries) {
                const double age = static_cast<double>(newest - std::min(newest, e.day));
                data.weights.push_back(std::pow(config_.discount, -age));
            }
            return gp::fit(data, config_.kernel, input_scale(grid));
        }
        return fit_from(entries, grid);
    }

    // Runs the long/short comparison and truncates the buffer on detection.
    // Only checked once the phase buffer holds more than two windows.
    bool check_changepoint(std::size_t j, std::size_t day, const BudgetGrid& grid, gp::GpPosterior& model) {
        auto& buf = buffers_[j];
        const std::size_t w = config_.window_length;
        if (buf.size() <= 2 * w) {
            return false;
        }
        if (!detections_[j].empty() && day < detections_[j].back() + w) {
            return false;
        }
        DualModels models{model, fit_from(std::span<const BufferEntry>(buf).last(w), grid)};
        if (!detect_changepoint(models, grid, config_.tau)) {
            return false;
        }
        buf.erase(buf.begin(), buf.end() - static_cast<std::ptrdiff_t>(w));
        detections_[j].push_back(day);
        model = std::move(models.short_model);
        return true;
    }

    PolicyConfig config_;
    std::uint64_t seed_;
    std::vector<std::vector<BufferEntry>> buffers_;
    std::vector<std::vector<BufferEntry>> histories_;
    std::vector<std::vector<std::size_t>> detections_;
};

} // namespace aba
