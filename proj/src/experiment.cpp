#include "driftwatch/experiment.hpp"

#include <fstream>
#include <map>

#include "driftwatch/csv.hpp"

namespace driftwatch {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

void expect_object(const json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path, "expected an object");
}

void check_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
    for (const auto& item : j.items())
        if (allowed.find(item.key()) == allowed.end())
            throw ConfigError(path + "." + item.key(), "unknown field");
}

double get_number(const json& j, const std::string& path, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number()) throw ConfigError(path + "." + key, "expected a number");
    return v.get<double>();
}

std::size_t get_count(const json& j, const std::string& path, const char* key,
                      std::size_t fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    const bool ok =
        v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0);
    if (!ok) throw ConfigError(path + "." + key, "expected a nonnegative integer");
    return v.get<std::size_t>();
}

bool get_bool(const json& j, const std::string& path, const char* key, bool fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_boolean()) throw ConfigError(path + "." + key, "expected a boolean");
    return v.get<bool>();
}

std::string get_string(const json& j, const std::string& path, const char* key,
                       const std::string& fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_string()) throw ConfigError(path + "." + key, "expected a string");
    return v.get<std::string>();
}

std::array<double, 2> get_pair(const json& j, const std::string& path, const char* key,
                               std::array<double, 2> fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw ConfigError(path + "." + key, "expected an array of two numbers");
    return {v[0].get<double>(), v[1].get<double>()};
}

StreamConfig parse_stream(const json& j, const std::string& path) {
    expect_object(j, path);
    const std::string type = get_string(j, path, "type", "");
    if (type.empty()) throw ConfigError(path + ".type", "required field is missing");

    if (type == "synthetic") {
        check_keys(j, path,
                   {"type", "steps", "batch_size", "initial_mean", "initial_std", "mean_velocity",
                    "variance_growth", "boundary_rotation", "label_sharpness"});
        SyntheticDriftConfig cfg;
        cfg.steps = get_count(j, path, "steps", cfg.steps);
        cfg.batch_size = get_count(j, path, "batch_size", cfg.batch_size);
        cfg.initial_mean = get_pair(j, path, "initial_mean", cfg.initial_mean);
        cfg.initial_std = get_number(j, path, "initial_std", cfg.initial_std);
        cfg.mean_velocity = get_pair(j, path, "mean_velocity", cfg.mean_velocity);
        cfg.variance_growth = get_number(j, path, "variance_growth", cfg.variance_growth);
        cfg.boundary_rotation = get_number(j, path, "boundary_rotation", cfg.boundary_rotation);
        cfg.label_sharpness = get_number(j, path, "label_sharpness", cfg.label_sharpness);
        try {
            cfg.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(path, e.what());
        }
        return cfg;
    }

    if (type == "finance_csv" || type == "pageviews_csv" || type == "raw_csv") {
        check_keys(j, path, {"type", "path", "target_column", "rolling_window", "batch_size"});
        CsvStreamConfig cfg;
        cfg.recipe = type == "finance_csv"    ? FeatureRecipe::Finance
                     : type == "pageviews_csv" ? FeatureRecipe::PageViews
                                               : FeatureRecipe::Raw;
        const std::string file = get_string(j, path, "path", "");
        if (file.empty()) throw ConfigError(path + ".path", "required field is missing");
        cfg.path = file;
        cfg.target_column = get_string(j, path, "target_column", "");
        cfg.rolling_window = get_count(j, path, "rolling_window", cfg.rolling_window);
        cfg.batch_size = get_count(j, path, "batch_size", cfg.batch_size);
        if (cfg.recipe == FeatureRecipe::Raw && cfg.target_column.empty())
            throw ConfigError(path + ".target_column", "required for raw_csv streams");
        return cfg;
    }

    throw ConfigError(path + ".type",
                      "unknown stream type '" + type +
                          "' (expected synthetic, finance_csv, pageviews_csv, raw_csv)");
}

EwmaConfig parse_ewma(const json& j, const std::string& path, const EwmaConfig& defaults) {
    expect_object(j, path);
    check_keys(j, path, {"half_life", "level", "epsilon", "warmup_steps", "reset_on_trigger"});
    EwmaConfig cfg = defaults;
    cfg.half_life = get_number(j, path, "half_life", cfg.half_life);
    cfg.level = get_number(j, path, "level", cfg.level);
    cfg.epsilon = get_number(j, path, "epsilon", cfg.epsilon);
    cfg.warmup_steps = get_count(j, path, "warmup_steps", cfg.warmup_steps);
    cfg.reset_on_trigger = get_bool(j, path, "reset_on_trigger", cfg.reset_on_trigger);
    return cfg;
}

TrainConfig parse_train(const json& j, const std::string& path, const TrainConfig& defaults) {
    expect_object(j, path);
    check_keys(j, path, {"l2", "max_iters", "learning_rate", "grad_tol"});
    TrainConfig cfg = defaults;
    cfg.l2 = get_number(j, path, "l2", cfg.l2);
    cfg.max_iters = get_count(j, path, "max_iters", cfg.max_iters);
    cfg.learning_rate = get_number(j, path, "learning_rate", cfg.learning_rate);
    cfg.grad_tol = get_number(j, path, "grad_tol", cfg.grad_tol);
    return cfg;
}

RunConfig parse_run(const json& j, const std::string& path) {
    expect_object(j, path);
    check_keys(j, path,
               {"policy", "window_steps", "init_steps", "fit_fraction", "ewma", "train"});
    RunConfig cfg;
    const std::string name = get_string(j, path, "policy", "");
    if (name.empty()) throw ConfigError(path + ".policy", "required field is missing");
    try {
        cfg.policy = policy_from_name(name);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path + ".policy", e.what());
    }
    cfg.window_steps = get_count(j, path, "window_steps", cfg.window_steps);
    cfg.init_steps = get_count(j, path, "init_steps", cfg.init_steps);
    cfg.fit_fraction = get_number(j, path, "fit_fraction", cfg.fit_fraction);
    if (j.contains("ewma")) cfg.ewma = parse_ewma(j.at("ewma"), path + ".ewma", cfg.ewma);
    if (j.contains("train")) cfg.train = parse_train(j.at("train"), path + ".train", cfg.train);
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path, e.what());
    }
    return cfg;
}

ordered_json stream_to_json(const StreamConfig& stream) {
    ordered_json out;
    if (const auto* synthetic = std::get_if<SyntheticDriftConfig>(&stream)) {
        out["type"] = "synthetic";
        out["steps"] = synthetic->steps;
        out["batch_size"] = synthetic->batch_size;
        out["initial_mean"] = synthetic->initial_mean;
        out["initial_std"] = synthetic->initial_std;
        out["mean_velocity"] = synthetic->mean_velocity;
        out["variance_growth"] = synthetic->variance_growth;
        out["boundary_rotation"] = synthetic->boundary_rotation;
        out["label_sharpness"] = synthetic->label_sharpness;
        return out;
    }
    const auto& csv = std::get<CsvStreamConfig>(stream);
    switch (csv.recipe) {
        case FeatureRecipe::Finance: out["type"] = "finance_csv"; break;
        case FeatureRecipe::PageViews: out["type"] = "pageviews_csv"; break;
        case FeatureRecipe::Raw: out["type"] = "raw_csv"; break;
    }
    out["path"] = csv.path.string();
    out["target_column"] = csv.target_column;
    out["rolling_window"] = csv.rolling_window;
    out["batch_size"] = csv.batch_size;
    return out;
}

ordered_json run_to_json(const RunConfig& run) {
    ordered_json out;
    out["policy"] = policy_name(run.policy);
    out["window_steps"] = run.window_steps;
    out["init_steps"] = run.init_steps;
    out["fit_fraction"] = run.fit_fraction;
    out["ewma"] = {{"half_life", run.ewma.half_life},
                   {"level", run.ewma.level},
                   {"epsilon", run.ewma.epsilon},
                   {"warmup_steps", run.ewma.warmup_steps},
                   {"reset_on_trigger", run.ewma.reset_on_trigger}};
    out["train"] = {{"l2", run.train.l2},
                    {"max_iters", run.train.max_iters},
                    {"learning_rate", run.train.learning_rate},
                    {"grad_tol", run.train.grad_tol}};
    return out;
}

}  // namespace

ExperimentConfig parse_experiment_config(const json& j) {
    expect_object(j, "config");
    check_keys(j, "config", {"seed", "stream", "policies", "emit"});

    ExperimentConfig cfg;
    if (j.contains("seed")) {
        const json& v = j.at("seed");
        const bool ok = v.is_number_unsigned() ||
                        (v.is_number_integer() && v.get<long long>() >= 0);
        if (!ok) throw ConfigError("config.seed", "expected a nonnegative integer");
        cfg.seed = v.get<std::uint64_t>();
    }
    if (!j.contains("stream")) throw ConfigError("config.stream", "required field is missing");
    cfg.stream = parse_stream(j.at("stream"), "config.stream");
    if (auto* synthetic = std::get_if<SyntheticDriftConfig>(&cfg.stream))
        synthetic->seed = RngSeed{cfg.seed};

    if (!j.contains("policies")) throw ConfigError("config.policies", "required field is missing");
    const json& policies = j.at("policies");
    if (!policies.is_array() || policies.empty())
        throw ConfigError("config.policies", "expected a nonempty array");
    for (std::size_t i = 0; i < policies.size(); ++i)
        cfg.policies.push_back(
            parse_run(policies[i], "config.policies[" + std::to_string(i) + "]"));

    if (j.contains("emit")) {
        const json& emit = j.at("emit");
        if (!emit.is_array()) throw ConfigError("config.emit", "expected an array of strings");
        cfg.emit.clear();
        for (const json& e : emit) {
            if (!e.is_string()) throw ConfigError("config.emit", "expected an array of strings");
            const std::string kind = e.get<std::string>();
            if (kEmitKinds.find(kind) == kEmitKinds.end())
                throw ConfigError("config.emit", "unknown artifact kind '" + kind + "'");
            cfg.emit.insert(kind);
        }
    }
    return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open file: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("config", std::string("invalid JSON: ") + e.what());
    }
    return parse_experiment_config(j);
}

ordered_json resolved_experiment_json(const ExperimentConfig& config) {
    ordered_json out;
    out["seed"] = config.seed;
    out["stream"] = stream_to_json(config.stream);
    out["policies"] = ordered_json::array();
    for (const RunConfig& run : config.policies) out["policies"].push_back(run_to_json(run));
    out["emit"] = config.emit;
    return out;
}

namespace {

std::vector<std::string> policy_dir_names(const std::vector<RunConfig>& policies) {
    std::vector<std::string> names;
    std::map<std::string, int> seen;
    for (const RunConfig& run : policies) {
        std::string base = policy_name(run.policy);
        const int count = ++seen[base];
        names.push_back(count == 1 ? base : base + "_" + std::to_string(count));
    }
    return names;
}

bool has_signal(PolicyKind kind) {
    return kind == PolicyKind::EntropyTriggered || kind == PolicyKind::PerformanceTriggered;
}

}  // namespace

std::vector<PolicyRunResult> run_experiment(const ExperimentConfig& config,
                                            const std::filesystem::path& out_dir) {
    const std::vector<PolicyRunResult> results = compare_policies(config.stream, config.policies);
    const std::vector<std::string> names = policy_dir_names(config.policies);

    std::filesystem::create_directories(out_dir);

    for (std::size_t k = 0; k < results.size(); ++k) {
        const PolicyRunResult& result = results[k];
        const std::filesystem::path dir = out_dir / names[k];
        std::filesystem::create_directories(dir);

        if (config.emit.count("loss_series")) {
            CsvWriter out(dir / "loss_series.csv");
            out.write_row({"step", "loss"});
            for (std::size_t i = 0; i < result.per_step_loss.size(); ++i)
                out.write_row({std::to_string(result.first_eval_step + i),
                               format_double(result.per_step_loss[i])});
        }
        if (config.emit.count("cumulative_retrains")) {
            CsvWriter out(dir / "cumulative_retrains.csv");
            out.write_row({"step", "count"});
            std::size_t done = 0;
            for (std::size_t i = 0; i < result.per_step_loss.size(); ++i) {
                const std::size_t step = result.first_eval_step + i;
                while (done < result.retrain_steps.size() && result.retrain_steps[done] <= step)
                    ++done;
                out.write_row({std::to_string(step), std::to_string(done)});
            }
        }
        if (config.emit.count("signal_series") && has_signal(result.policy)) {
            CsvWriter out(dir / "signal_series.csv");
            out.write_row({"step", "signal", "z", "triggered"});
            for (std::size_t i = 0; i < result.signal.size(); ++i)
                out.write_row({std::to_string(result.first_eval_step + i),
                               format_double(result.signal[i].value),
                               format_double(result.signal[i].z),
                               result.signal[i].triggered ? "1" : "0"});
        }
    }

    if (config.emit.count("pareto")) {
        CsvWriter out(out_dir / "pareto.csv");
        out.write_row({"policy", "avg_loss", "retrain_count", "retrain_fraction"});
        for (std::size_t k = 0; k < results.size(); ++k)
            out.write_row({names[k], format_double(results[k].avg_loss),
                           std::to_string(results[k].retrain_count),
                           format_double(results[k].retrain_fraction)});
    }

    if (config.emit.count("summary")) {
        ordered_json summary;
        summary["config"] = resolved_experiment_json(config);
        summary["policies"] = ordered_json::array();
        for (std::size_t k = 0; k < results.size(); ++k) {
            ordered_json entry;
            entry["name"] = names[k];
            entry["policy"] = policy_name(results[k].policy);
            entry["avg_loss"] = results[k].avg_loss;
            entry["retrain_count"] = results[k].retrain_count;
            entry["retrain_fraction"] = results[k].retrain_fraction;
            entry["evaluated_steps"] = results[k].evaluated_steps();
            entry["first_eval_step"] = results[k].first_eval_step;
            entry["retrain_steps"] = results[k].retrain_steps;
            summary["policies"].push_back(std::move(entry));
        }
        std::ofstream out(out_dir / "summary.json");
        out << summary.dump(2) << '\n';
    }

    return results;
}

}  // namespace driftwatch
