// Command line driver: run experiments, ablations, and synthetic log generation.
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aba/experiment.hpp"

namespace {

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

void apply_overrides(aba::ExperimentConfig& cfg, const std::string& out, const std::string& seeds,
                     const std::string& policies) {
    if (!out.empty()) {
        cfg.out_dir = out;
    }
    if (!seeds.empty()) {
        cfg.seeds.clear();
        for (const auto& s : split_list(seeds)) {
            try {
                std::size_t used = 0;
                cfg.seeds.push_back(std::stoull(s, &used));
                if (used != s.size()) {
                    throw std::invalid_argument(s);
                }
            } catch (const std::exception&) {
                throw aba::ConfigError("--seeds: '" + s + "' is not a nonnegative integer");
            }
        }
    }
    if (!policies.empty()) {
        const auto base = cfg.policies.empty() ? aba::PolicyConfig{} : cfg.policies.front().config;
        std::vector<aba::PolicySpec> picked;
        for (const auto& name : split_list(policies)) {
            const auto it = std::find_if(cfg.policies.begin(), cfg.policies.end(),
                                         [&](const aba::PolicySpec& p) { return p.name == name; });
            if (it != cfg.policies.end()) {
                picked.push_back(*it);
                continue;
            }
            aba::PolicySpec p{"", base};
            p.config.variant = aba::parse_variant(name);
            p.name = std::string(aba::to_string(p.config.variant));
            picked.push_back(p);
        }
        cfg.policies = std::move(picked);
    }
    cfg.validate();
}

void print_summary(const aba::ExperimentResult& result, const std::string& out_dir) {
    for (const auto& row : result.summary) {
        std::cout << row.policy << ": clicks " << aba::format_decimal(row.clicks_mean) << " +- "
                  << aba::format_decimal(row.clicks_std) << ", regret " << aba::format_decimal(row.regret_mean)
                  << " +- " << aba::format_decimal(row.regret_std) << '\n';
    }
    std::cout << "results in " << out_dir << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multichannel ad budget allocation simulator"};
    app.require_subcommand(1);

    std::string config_path, out, seeds, policies;
    auto* run = app.add_subcommand("run", "run every configured policy over every seed");
    run->add_option("--config", config_path, "experiment config (JSON)")->required();
    run->add_option("--out", out, "output directory (overrides the config)");
    run->add_option("--seeds", seeds, "comma-separated seeds (overrides the config)");
    run->add_option("--policies", policies, "comma-separated policy names (overrides the config)");

    std::string ablate_config, ablate_out, ablate_seeds;
    auto* ablate = app.add_subcommand("ablate", "run the four TUCB-MAE component variants");
    ablate->add_option("--config", ablate_config, "experiment config (JSON)")->required();
    ablate->add_option("--out", ablate_out, "output directory (overrides the config)");
    ablate->add_option("--seeds", ablate_seeds, "comma-separated seeds (overrides the config)");

    std::string spec_path, csv_path;
    auto* gen = app.add_subcommand("gen", "write a synthetic logged campaign CSV");
    gen->add_option("--spec", spec_path, "scenario spec (JSON)")->required();
    gen->add_option("--out", csv_path, "output CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*run) {
            auto cfg = aba::load_experiment_config(config_path);
            apply_overrides(cfg, out, seeds, policies);
            print_summary(aba::run_experiment(cfg), cfg.out_dir);
        } else if (*ablate) {
            auto cfg = aba::load_experiment_config(ablate_config);
            apply_overrides(cfg, ablate_out, ablate_seeds, "");
            const auto result = aba::run_ablation(cfg);
            print_summary(result, cfg.out_dir);
        } else if (*gen) {
            const auto spec = aba::detail::parse_scenario_spec(aba::detail::read_json_file(spec_path));
            aba::write_logged_csv(csv_path, aba::generate_logged_campaign(spec));
            std::cout << "wrote " << csv_path << '\n';
        }
    } catch (const aba::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const aba::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
