// driftwatch — streaming drift monitoring and retraining-policy benchmarks.
//
// Subcommands:
//   run            execute a policy-comparison experiment from a JSON config
//   verify-entropy integrate the Fokker-Planck fixtures and check the
//                  entropy-balance properties
//   gen-fixtures   write the bundled toy finance/pageviews CSVs
//
// Exit codes: 0 success, 1 runtime or check failure, 2 config error.

#include <cstdio>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "driftwatch/experiment.hpp"
#include "driftwatch/streams.hpp"

namespace {

int cmd_run(const std::string& config_path, const std::string& out_dir,
            const std::optional<std::uint64_t>& seed_override) {
    driftwatch::ExperimentConfig config =
        driftwatch::load_experiment_config(config_path);
    if (seed_override) {
        config.seed = *seed_override;
        if (auto* synthetic = std::get_if<driftwatch::SyntheticDriftConfig>(&config.stream))
            synthetic->seed = driftwatch::RngSeed{config.seed};
    }
    const auto results = driftwatch::run_experiment(config, out_dir);
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& r = results[i];
        std::printf("%-12s avg_loss=%.6f retrains=%zu (%.1f%%)\n",
                    driftwatch::policy_name(r.policy), r.avg_loss, r.retrain_count,
                    100.0 * r.retrain_fraction);
    }
    std::printf("artifacts written to %s\n", out_dir.c_str());
    return 0;
}

int cmd_verify_entropy(const std::string& config_path, const std::string& out_dir) {
    const driftwatch::EntropyLabConfig config = driftwatch::load_entropy_config(config_path);
    const driftwatch::EntropyLabReport report = driftwatch::verify_entropy(config, out_dir);
    for (const auto& check : report.checks)
        std::printf("[%s] %s: %s (%s)\n", check.fixture.c_str(), check.name.c_str(),
                    check.pass ? "PASS" : "FAIL", check.detail.c_str());
    std::printf("verify-entropy: %s\n", report.all_pass() ? "PASS" : "FAIL");
    return report.all_pass() ? 0 : 1;
}

int cmd_gen_fixtures(const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    const auto finance = std::filesystem::path(out_dir) / "finance_toy.csv";
    const auto pageviews = std::filesystem::path(out_dir) / "pageviews_toy.csv";
    driftwatch::write_toy_finance_csv(finance);
    driftwatch::write_toy_pageviews_csv(pageviews);
    std::printf("wrote %s\n", finance.string().c_str());
    std::printf("wrote %s\n", pageviews.string().c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"streaming drift monitoring and retraining-policy benchmarks"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed_override;

    auto* run = app.add_subcommand("run", "run a policy-comparison experiment");
    run->add_option("--config", config_path, "experiment config (JSON)")->required();
    run->add_option("--out", out_dir, "output directory (default: out)");
    run->add_option("--seed", seed_override, "override the config seed");

    auto* verify = app.add_subcommand("verify-entropy", "run the entropy-balance checks");
    verify->add_option("--config", config_path, "fixture config (JSON)")->required();
    verify->add_option("--out", out_dir, "output directory (default: out)");

    auto* fixtures = app.add_subcommand("gen-fixtures", "write the toy CSV fixtures");
    fixtures->add_option("--out", out_dir, "output directory (default: out)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, out_dir, seed_override);
        if (verify->parsed()) return cmd_verify_entropy(config_path, out_dir);
        if (fixtures->parsed()) return cmd_gen_fixtures(out_dir);
    } catch (const driftwatch::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
