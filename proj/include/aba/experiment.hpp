#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "aba/datagen.hpp"
#include "aba/errors.hpp"
#include "aba/eval.hpp"
#include "aba/grid.hpp"
#include "aba/logged_data.hpp"
#include "aba/policy.hpp"
#include "aba/sim.hpp"

namespace aba {

struct PolicySpec {
    std::string name;
    PolicyConfig config;
};

struct CriteoSource {
    std::string path;
    std::vector<std::string> campaign_ids;
    CriteoMapping mapping;
};

struct ExperimentConfig {
    std::optional<std::string> logged_csv;
    std::optional<ScenarioSpec> scenario;
    std::optional<CriteoSource> criteo;
    std::string group_id;
    std::vector<std::uint64_t> seeds{1, 42, 76};
    std::size_t granularity = 500;
    double min_budget = 0.0;
    std::size_t warm_start_days = 7;
    std::optional<std::size_t> horizon_days;
    EnvConfig environment{};
    std::vector<PolicySpec> policies;
    bool trace_acquisition = false;
    std::string out_dir = "results";

    void validate() const {
        const int sources = int(logged_csv.has_value()) + int(scenario.has_value()) + int(criteo.has_value());
        if (sources != 1) {
            throw ConfigError("scenario: give exactly one of logged_csv, spec, spec_file or criteo");
        }
        if (logged_csv && !std::filesystem::exists(*logged_csv)) {
            throw ConfigError("scenario.logged_csv: file '" + *logged_csv + "' does not exist");
        }
        if (criteo && !std::filesystem::exists(criteo->path)) {
            throw ConfigError("scenario.criteo.path: file '" + criteo->path + "' does not exist");
        }
        if (scenario) {
            scenario->validate();
        }
        if (granularity < 2) {
            throw ConfigError("granularity: must be at least 2");
        }
        if (seeds.empty()) {
            throw ConfigError("seeds: at least one seed required");
        }
        if (policies.empty()) {
            throw ConfigError("policies: at least one policy required");
        }
        for (const auto& p : policies) {
            if (p.name.empty() || p.name.find_first_of("/\\,") != std::string::npos) {
                throw ConfigError("policies: name '" + p.name + "' is empty or contains '/', '\\\\' or ','");
            }
            p.config.validate();
        }
        if (!(min_budget >= 0.0)) {
            throw ConfigError("min_budget: must be nonnegative");
        }
    }
};

namespace detail {

using nlohmann::json;

template <typename T>
T get_field(const json& j, const char* key, const std::string& where, T fallback) {
    if (!j.contains(key)) {
        return fallback;
    }
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(where + key + ": " + e.what());
    }
}

inline std::string resolve(const std::filesystem::path& base, const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() || base.empty() ? p : (base / path).lexically_normal().string();
}

inline Date parse_date_field(const json& j, const char* key, const std::string& where, Date fallback) {
    if (!j.contains(key)) {
        return fallback;
    }
    try {
        return Date::parse(j.at(key).get<std::string>());
    } catch (const std::exception& e) {
        throw ConfigError(where + key + ": " + e.what());
    }
}

inline ScenarioSpec parse_scenario_spec(const json& j) {
    if (!j.is_object()) {
        throw ConfigError("scenario spec must be a JSON object");
    }
    ScenarioSpec s;
    const std::string w = "spec.";
    s.group_id = get_field(j, "group_id", w, s.group_id);
    s.start_date = parse_date_field(j, "start_date", w, s.start_date);
    s.horizon_days = get_field(j, "horizon_days", w, s.horizon_days);
    s.stationary_period = get_field(j, "stationary_period", w, s.stationary_period);
    s.tau = get_field(j, "tau", w, s.tau);
    s.cost_sigma_fraction = get_field(j, "cost_sigma_fraction", w, s.cost_sigma_fraction);
    s.reward_noise_std = get_field(j, "reward_noise_std", w, s.reward_noise_std);
    s.budget_walk_std = get_field(j, "budget_walk_std", w, s.budget_walk_std);
    s.budget_walk_clip = get_field(j, "budget_walk_clip", w, s.budget_walk_clip);
    s.seed = get_field(j, "seed", w, s.seed);
    if (!j.contains("campaigns") || !j["campaigns"].is_array()) {
        throw ConfigError("spec.campaigns: array required");
    }
    for (std::size_t i = 0; i < j["campaigns"].size(); ++i) {
        const auto& cj = j["campaigns"][i];
        const std::string cw = w + "campaigns[" + std::to_string(i) + "].";
        CampaignSpec c;
        c.id = get_field<std::string>(cj, "id", cw, "C" + std::to_string(i + 1));
        c.channel = get_field(cj, "channel", cw, c.channel);
        c.daily_spend = get_field(cj, "daily_spend", cw, c.daily_spend);
        c.conversion_rate = get_field(cj, "conversion_rate", cw, c.conversion_rate);
        if (!cj.contains("phases") || !cj["phases"].is_array()) {
            throw ConfigError(cw + "phases: array required");
        }
        for (std::size_t p = 0; p < cj["phases"].size(); ++p) {
            const auto& pj = cj["phases"][p];
            const std::string pw = cw + "phases[" + std::to_string(p) + "].";
            PhaseSpec ph;
            ph.start_day = get_field(pj, "start_day", pw, ph.start_day);
            ph.alpha = get_field(pj, "alpha", pw, ph.alpha);
            ph.omega = get_field(pj, "omega", pw, ph.omega);
            c.phases.push_back(ph);
        }
        s.campaigns.push_back(std::move(c));
    }
    return s;
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open '" + path + "'");
    }
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
    }
}

inline PolicyConfig policy_defaults(const json& root) {
    PolicyConfig d;
    d.beta = get_field(root, "beta", "", d.beta);
    d.tau = get_field(root, "tau", "", d.tau);
    d.window_length = get_field(root, "window_length", "", d.window_length);
    d.sliding_window = get_field(root, "sliding_window", "", d.sliding_window);
    d.discount = get_field(root, "discount", "", d.discount);
    if (root.contains("gp")) {
        const auto& g = root["gp"];
        d.kernel.signal_variance = get_field(g, "signal_variance", "gp.", d.kernel.signal_variance);
        d.kernel.length_scale = get_field(g, "length_scale", "gp.", d.kernel.length_scale);
        d.noise_variance = get_field(g, "noise_variance", "gp.", d.noise_variance);
    }
    return d;
}

inline EfficiencyMetric parse_metric(const std::string& s, const std::string& where) {
    if (s == "CPC" || s == "cpc") {
        return EfficiencyMetric::CPC;
    }
    if (s == "CPA" || s == "cpa") {
        return EfficiencyMetric::CPA;
    }
    throw ConfigError(where + "efficiency_metric: expected CPC or CPA, got '" + s + "'");
}

inline PolicySpec parse_policy(const json& pj, const PolicyConfig& defaults, std::size_t i) {
    const std::string w = "policies[" + std::to_string(i) + "].";
    PolicySpec p;
    p.config = defaults;
    try {
        if (pj.is_string()) {
            p.config.variant = parse_variant(pj.get<std::string>());
            p.name = std::string(to_string(p.config.variant));
            return p;
        }
        if (!pj.is_object()) {
            throw ConfigError(w + " must be a string or an object");
        }
        const auto variant = get_field<std::string>(pj, "variant", w, get_field<std::string>(pj, "name", w, ""));
        p.config.variant = parse_variant(variant);
    } catch (const ConfigError& e) {
        throw ConfigError(w + "variant: " + e.what());
    }
    p.name = get_field<std::string>(pj, "name", w, std::string(to_string(p.config.variant)));
    auto& c = p.config;
    c.beta = get_field(pj, "beta", w, c.beta);
    c.tau = get_field(pj, "tau", w, c.tau);
    c.window_length = get_field(pj, "window_length", w, c.window_length);
    c.sliding_window = get_field(pj, "sliding_window", w, c.sliding_window);
    c.discount = get_field(pj, "discount", w, c.discount);
    c.use_saturating_mean = get_field(pj, "use_saturating_mean", w, c.use_saturating_mean);
    c.use_targeted_ucb = get_field(pj, "use_targeted_ucb", w, c.use_targeted_ucb);
    c.use_efficiency = get_field(pj, "use_efficiency", w, c.use_efficiency);
    if (pj.contains("efficiency_metric")) {
        c.efficiency_metric = parse_metric(get_field<std::string>(pj, "efficiency_metric", w, "CPC"), w);
    }
    return p;
}

} // namespace detail

// Parses an experiment config. Relative paths are resolved against base_dir.
inline ExperimentConfig parse_experiment_config(const nlohmann::json& root, const std::filesystem::path& base_dir = {}) {
    using detail::get_field;
    if (!root.is_object()) {
        throw ConfigError("experiment config must be a JSON object");
    }
    ExperimentConfig cfg;
    if (!root.contains("scenario") || !root["scenario"].is_object()) {
        throw ConfigError("scenario: object required");
    }
    const auto& sc = root["scenario"];
    if (sc.contains("logged_csv")) {
        cfg.logged_csv = detail::resolve(base_dir, get_field<std::string>(sc, "logged_csv", "scenario.", ""));
    }
    if (sc.contains("spec")) {
        cfg.scenario = detail::parse_scenario_spec(sc["spec"]);
    }
    if (sc.contains("spec_file")) {
        const auto path = detail::resolve(base_dir, get_field<std::string>(sc, "spec_file", "scenario.", ""));
        if (!std::filesystem::exists(path)) {
            throw ConfigError("scenario.spec_file: file '" + path + "' does not exist");
        }
        if (cfg.scenario) {
            throw ConfigError("scenario: give exactly one of logged_csv, spec, spec_file or criteo");
        }
        cfg.scenario = detail::parse_scenario_spec(detail::read_json_file(path));
    }
    if (sc.contains("criteo")) {
        const auto& cj = sc["criteo"];
        CriteoSource src;
        src.path = detail::resolve(base_dir, get_field<std::string>(cj, "path", "scenario.criteo.", ""));
        src.campaign_ids = get_field<std::vector<std::string>>(cj, "campaign_ids", "scenario.criteo.", {});
        if (src.campaign_ids.empty()) {
            throw ConfigError("scenario.criteo.campaign_ids: at least one id required");
        }
        if (cj.contains("mapping")) {
            const auto& m = cj["mapping"];
            const std::string w = "scenario.criteo.mapping.";
            auto& mp = src.mapping;
            const auto sep = get_field<std::string>(m, "separator", w, "auto");
            mp.separator = sep == "auto" ? 0 : (sep == "\\t" || sep == "tab" ? '\t' : sep.empty() ? 0 : sep[0]);
            mp.timestamp_column = get_field(m, "timestamp_column", w, mp.timestamp_column);
            mp.campaign_column = get_field(m, "campaign_column", w, mp.campaign_column);
            mp.cost_column = get_field(m, "cost_column", w, mp.cost_column);
            mp.click_column = get_field(m, "click_column", w, mp.click_column);
            mp.conversion_column = get_field(m, "conversion_column", w, mp.conversion_column);
            mp.seconds_per_day = get_field(m, "seconds_per_day", w, mp.seconds_per_day);
            mp.base_date = detail::parse_date_field(m, "base_date", w, mp.base_date);
            mp.group_id = get_field(m, "group_id", w, mp.group_id);
            mp.channel = get_field(m, "channel", w, mp.channel);
        }
        cfg.criteo = std::move(src);
    }
    cfg.group_id = get_field(root, "group_id", "", cfg.group_id);
    cfg.seeds = get_field(root, "seeds", "", cfg.seeds);
    cfg.granularity = get_field(root, "granularity", "", cfg.granularity);
    cfg.min_budget = get_field(root, "min_budget", "", cfg.min_budget);
    cfg.warm_start_days = get_field(root, "warm_start_days", "", cfg.warm_start_days);
    if (root.contains("horizon_days") && !root["horizon_days"].is_null()) {
        cfg.horizon_days = get_field<std::size_t>(root, "horizon_days", "", 0);
    }
    cfg.environment.stationary_period = get_field(root, "stationary_period", "", cfg.environment.stationary_period);
    if (root.contains("environment")) {
        const auto& e = root["environment"];
        const std::string w = "environment.";
        cfg.environment.cost_sigma_fraction = get_field(e, "cost_sigma_fraction", w, cfg.environment.cost_sigma_fraction);
        cfg.environment.reward_noise_std = get_field(e, "reward_noise_std", w, cfg.environment.reward_noise_std);
        cfg.environment.switch_threshold = get_field(e, "switch_threshold", w, cfg.environment.switch_threshold);
    }
    cfg.trace_acquisition = get_field(root, "trace_acquisition", "", cfg.trace_acquisition);
    cfg.out_dir = detail::resolve(base_dir, get_field(root, "out", "", cfg.out_dir));

    const PolicyConfig defaults = detail::policy_defaults(root);
    if (root.contains("policies")) {
        if (!root["policies"].is_array()) {
            throw ConfigError("policies: array required");
        }
        for (std::size_t i = 0; i < root["policies"].size(); ++i) {
            cfg.policies.push_back(detail::parse_policy(root["policies"][i], defaults, i));
        }
    } else {
        for (Variant v : kAllVariants) {
            PolicySpec p{std::string(to_string(v)), defaults};
            p.config.variant = v;
            cfg.policies.push_back(std::move(p));
        }
    }
    cfg.validate();
    return cfg;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
    const auto root = detail::read_json_file(path);
    return parse_experiment_config(root, std::filesystem::path(path).parent_path());
}

inline std::vector<LoggedRecord> load_records(const ExperimentConfig& cfg) {
    if (cfg.logged_csv) {
        return read_logged_csv(*cfg.logged_csv);
    }
    if (cfg.scenario) {
        return generate_logged_campaign(*cfg.scenario);
    }
    auto loaded = load_criteo(cfg.criteo->path, cfg.criteo->campaign_ids, cfg.criteo->mapping);
    if (loaded.records.empty()) {
        throw DataError("attribution log yielded no records for the requested campaigns");
    }
    return std::move(loaded.records);
}

struct AcquisitionTraceRow {
    std::size_t day;
    std::size_t campaign;
    std::size_t level;
    double budget;
    double mean;
    double std;
    double acquisition;
    std::optional<double> b_max;
    double theta;
};

struct CellResult {
    std::string policy;
    std::uint64_t seed = 0;
    std::vector<DailyMetrics> days;
    double cumulative_clicks = 0.0;
    double cumulative_regret = 0.0;
    double realized_regret = 0.0;
    std::optional<double> cpc;
    std::vector<std::vector<std::size_t>> detections;
    std::vector<AcquisitionTraceRow> trace;
};

// One (policy, seed) run over the simulated horizon. Every policy sees the
// same environment noise for a given seed.
inline CellResult run_cell(const LoggedGroup& logs, const ExperimentConfig& cfg, const PolicySpec& spec,
                           std::uint64_t seed) {
    const std::size_t warm = cfg.warm_start_days;
    if (warm >= logs.horizon) {
        throw ConfigError("warm_start_days: " + std::to_string(warm) + " leaves no days to simulate");
    }
    EnvConfig env_cfg = cfg.environment;
    env_cfg.seed = seed;
    Environment env(logs, env_cfg, warm);
    Policy policy(spec.config, logs.num_campaigns(), seed);
    for (std::size_t j = 0; j < logs.num_campaigns(); ++j) {
        std::vector<BufferEntry> history;
        for (std::size_t d = 0; d < warm; ++d) {
            if (const auto& day = logs.campaigns[j].days[d]) {
                history.push_back({d, day->cost, day->cost, day->clicks, day->conversions});
            }
        }
        policy.warm_start(j, history);
    }

    std::size_t last = logs.horizon;
    if (cfg.horizon_days) {
        last = std::min(last, warm + *cfg.horizon_days);
    }
    CellResult result;
    result.policy = spec.name;
    result.seed = seed;
    std::vector<SpendRecord> spend;
    std::vector<Observation> prior;
    for (std::size_t day = warm; day < last; ++day) {
        const double cap = env.daily_cap(day);
        const BudgetGrid grid(cfg.min_budget, std::max(cap, cfg.min_budget), cfg.granularity);
        const auto decision = policy.allocate_day(day, grid, cap, prior);
        const auto truth = env.current_models();
        const auto oracle = oracle_allocate(truth, grid, cap);
        const auto obs = env.step(decision.allocation.per_campaign_budget);

        DailyMetrics m;
        m.day = day;
        m.budgets = decision.allocation.per_campaign_budget;
        m.oracle_budgets = oracle.per_campaign_budget;
        for (std::size_t j = 0; j < truth.size(); ++j) {
            m.oracle_values.push_back(expected_reward(truth[j], oracle.per_campaign_budget[j]));
            m.policy_values.push_back(expected_reward(truth[j], m.budgets[j]));
        }
        m.oracle_value = expected_value(truth, oracle.per_campaign_budget);
        m.policy_value = expected_value(truth, m.budgets);
        m.regret = instantaneous_regret(truth, oracle, decision.allocation);
        double realized = 0.0;
        for (const auto& o : obs) {
            m.costs.push_back(o.cost);
            m.rewards.push_back(o.reward);
            realized += o.reward;
            spend.push_back({o.cost, o.reward});
        }
        m.realized_regret = m.oracle_value - realized;
        result.cumulative_clicks += realized;
        result.cumulative_regret += m.regret;
        result.realized_regret += m.realized_regret;
        m.cumulative_clicks = result.cumulative_clicks;
        m.cumulative_regret = result.cumulative_regret;
        m.running_cpc = cpc_metric(spend);
        result.days.push_back(std::move(m));

        if (cfg.trace_acquisition) {
            for (std::size_t j = 0; j < decision.campaigns.size(); ++j) {
                const auto& dg = decision.campaigns[j];
                for (std::size_t i = 0; i < grid.size(); ++i) {
                    result.trace.push_back({day, j, i, grid[i], dg.means[i], dg.stds[i], dg.acquisition[i], dg.b_max,
                                            dg.theta});
                }
            }
        }
        prior = obs;
    }
    result.cpc = cpc_metric(spend);
    for (std::size_t j = 0; j < logs.num_campaigns(); ++j) {
        result.detections.push_back(policy.detections(j));
    }
    return result;
}

// Rows per (day, campaign). oracle_value and regret are the campaign's share
// of the day's expected gap; the cumulative columns are group totals.
inline std::string daily_csv(const CellResult& cell, const LoggedGroup& logs) {
    std::ostringstream out;
    out << "day,campaign,budget,cost,reward,oracle_value,regret,cum_regret,cum_clicks\n";
    for (const auto& m : cell.days) {
        for (std::size_t j = 0; j < m.budgets.size(); ++j) {
            out << m.day << ',' << logs.campaigns[j].id << ',' << format_decimal(m.budgets[j]) << ','
                << format_decimal(m.costs[j]) << ',' << format_decimal(m.rewards[j]) << ','
                << format_decimal(m.oracle_values[j]) << ',' << format_decimal(m.oracle_values[j] - m.policy_values[j])
                << ',' << format_decimal(m.cumulative_regret) << ',' << format_decimal(m.cumulative_clicks) << '\n';
        }
    }
    return out.str();
}

inline std::string trace_csv(const CellResult& cell, const LoggedGroup& logs) {
    std::ostringstream out;
    out << "day,campaign,level,budget,mean,std,acquisition,b_max,theta\n";
    for (const auto& r : cell.trace) {
        out << r.day << ',' << logs.campaigns[r.campaign].id << ',' << r.level << ',' << format_decimal(r.budget)
            << ',' << format_decimal(r.mean) << ',' << format_decimal(r.std) << ',' << format_decimal(r.acquisition)
            << ',' << (r.b_max ? format_decimal(*r.b_max) : std::string()) << ',' << format_decimal(r.theta) << '\n';
    }
    return out.str();
}

struct SummaryRow {
    std::string policy;
    Variant variant = Variant::TUCB_MAE;
    bool saturating_mean = true;
    bool targeted_ucb = true;
    bool efficiency = true;
    std::size_t runs = 0;
    double clicks_mean = 0.0;
    double clicks_std = 0.0;
    double regret_mean = 0.0;
    double regret_std = 0.0;
    double cpc_mean = 0.0;
    double cpc_std = 0.0;
    double realized_regret_mean = 0.0;
};

namespace detail {

// mean and sample standard deviation (0 for a single value)
inline std::pair<double, double> mean_std(const std::vector<double>& xs) {
    if (xs.empty()) {
        return {std::nan(""), std::nan("")};
    }
    double sum = 0.0;
    for (double x : xs) {
        sum += x;
    }
    const double mean = sum / double(xs.size());
    if (xs.size() < 2) {
        return {mean, 0.0};
    }
    double ss = 0.0;
    for (double x : xs) {
        ss += (x - mean) * (x - mean);
    }
    return {mean, std::sqrt(ss / double(xs.size() - 1))};
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write '" + path.string() + "'");
    }
    out << text;
}

inline std::string seed_tag(std::uint64_t seed) { return std::to_string(seed); }

} // namespace detail

inline SummaryRow summarize(const PolicySpec& spec, const std::vector<CellResult>& cells) {
    SummaryRow row;
    row.policy = spec.name;
    row.variant = spec.config.variant;
    row.saturating_mean = spec.config.saturates();
    row.targeted_ucb = spec.config.targeted();
    row.efficiency = spec.config.efficiency_weighted();
    row.runs = cells.size();
    std::vector<double> clicks, regret, cpc, realized;
    for (const auto& c : cells) {
        clicks.push_back(c.cumulative_clicks);
        regret.push_back(c.cumulative_regret);
        realized.push_back(c.realized_regret);
        if (c.cpc) {
            cpc.push_back(*c.cpc);
        }
    }
    std::tie(row.clicks_mean, row.clicks_std) = detail::mean_std(clicks);
    std::tie(row.regret_mean, row.regret_std) = detail::mean_std(regret);
    std::tie(row.cpc_mean, row.cpc_std) = detail::mean_std(cpc);
    row.realized_regret_mean = detail::mean_std(realized).first;
    return row;
}

inline std::string summary_csv(const std::vector<SummaryRow>& rows) {
    std::ostringstream out;
    out << "policy,variant,saturating_mean,targeted_ucb,efficiency,runs,clicks_mean,clicks_std,regret_mean,"
           "regret_std,cpc_mean,cpc_std,realized_regret_mean\n";
    auto num = [](double x) { return std::isnan(x) ? std::string() : format_decimal(x); };
    for (const auto& r : rows) {
        out << r.policy << ',' << to_string(r.variant) << ',' << int(r.saturating_mean) << ',' << int(r.targeted_ucb)
            << ',' << int(r.efficiency) << ',' << r.runs << ',' << num(r.clicks_mean) << ',' << num(r.clicks_std)
            << ',' << num(r.regret_mean) << ',' << num(r.regret_std) << ',' << num(r.cpc_mean) << ','
            << num(r.cpc_std) << ',' << num(r.realized_regret_mean) << '\n';
    }
    return out.str();
}

struct ExperimentResult {
    std::vector<std::vector<CellResult>> cells; // [policy][seed]
    std::vector<SummaryRow> summary;
};

// Runs every (policy, seed) pair. Writes per-run daily CSVs and summary.csv
// when write_files is set.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, bool write_files = true) {
    cfg.validate();
    const auto records = load_records(cfg);
    const auto logs = LoggedGroup::from_records(records, cfg.group_id);
    ExperimentResult result;
    const std::filesystem::path out_dir(cfg.out_dir);
    if (write_files) {
        std::filesystem::create_directories(out_dir);
    }
    for (const auto& spec : cfg.policies) {
        std::vector<CellResult> cells;
        for (auto seed : cfg.seeds) {
            auto cell = run_cell(logs, cfg, spec, seed);
            if (write_files) {
                const std::string stem = spec.name + "_" + detail::seed_tag(seed);
                detail::write_text(out_dir / (stem + "_daily.csv"), daily_csv(cell, logs));
                if (cfg.trace_acquisition) {
                    detail::write_text(out_dir / (stem + "_acquisition.csv"), trace_csv(cell, logs));
                }
            }
            cell.trace.clear();
            cells.push_back(std::move(cell));
        }
        result.summary.push_back(summarize(spec, cells));
        result.cells.push_back(std::move(cells));
    }
    if (write_files) {
        detail::write_text(out_dir / "summary.csv", summary_csv(result.summary));
    }
    return result;
}

// The four TUCB-MAE component variants, sharing everything else with the
// first configured policy (or the defaults).
inline std::vector<PolicySpec> ablation_policies(const PolicyConfig& base) {
    auto make = [&](const char* name, bool sm, bool targeted, bool eff) {
        PolicySpec p{name, base};
        p.config.variant = Variant::TUCB_MAE;
        p.config.use_saturating_mean = sm;
        p.config.use_targeted_ucb = targeted;
        p.config.use_efficiency = eff;
        return p;
    };
    return {make("TUCB-MAE", true, true, true), make("TUCB-MAE-NoSM", false, true, true),
            make("TUCB-MAE-NoCPC", true, true, false), make("NoTUCB-MAE-WithCPC", true, false, true)};
}

inline ExperimentResult run_ablation(ExperimentConfig cfg, bool write_files = true) {
    PolicyConfig base = cfg.policies.empty() ? PolicyConfig{} : cfg.policies.front().config;
    for (const auto& p : cfg.policies) {
        if (p.config.variant == Variant::TUCB_MAE) {
            base = p.config;
            break;
        }
    }
    cfg.policies = ablation_policies(base);
    return run_experiment(cfg, write_files);
}

} // namespace aba
