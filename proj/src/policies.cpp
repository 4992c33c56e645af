#include "driftwatch/policies.hpp"

#include <deque>
#include <stdexcept>

#include "driftwatch/density.hpp"
#include "driftwatch/simd.hpp"

namespace driftwatch {

const char* policy_name(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::Never: return "never";
        case PolicyKind::EveryStep: return "every_step";
        case PolicyKind::EntropyTriggered: return "entropy";
        case PolicyKind::PerformanceTriggered: return "performance";
    }
    return "unknown";
}

PolicyKind policy_from_name(const std::string& name) {
    if (name == "never") return PolicyKind::Never;
    if (name == "every_step") return PolicyKind::EveryStep;
    if (name == "entropy") return PolicyKind::EntropyTriggered;
    if (name == "performance") return PolicyKind::PerformanceTriggered;
    throw std::invalid_argument("unknown policy '" + name +
                                "' (expected never, every_step, entropy, performance)");
}

void RunConfig::validate() const {
    if (init_steps == 0) throw std::invalid_argument("run.init_steps must be positive");
    if (window_steps == 0) throw std::invalid_argument("run.window_steps must be positive");
    if (!(fit_fraction > 0.0 && fit_fraction < 1.0))
        throw std::invalid_argument("run.fit_fraction must lie in (0,1)");
    ewma.validate();
    train.validate();
}

namespace {

struct PooledWindow {
    Matrix features;
    std::vector<int> labels;
};

PooledWindow pool(const std::deque<StreamBatch>& window) {
    PooledWindow out;
    for (const StreamBatch& batch : window) {
        out.features.append_rows(batch.features);
        out.labels.insert(out.labels.end(), batch.labels.begin(), batch.labels.end());
    }
    return out;
}

}  // namespace

PolicyRunResult run_policy(DriftStream& stream, const RunConfig& config) {
    config.validate();

    // Initial training window.
    std::deque<StreamBatch> window;
    for (std::size_t i = 0; i < config.init_steps; ++i) {
        auto batch = stream.next();
        if (!batch)
            throw std::runtime_error("run_policy: stream ended inside the initial window "
                                     "(need at least init_steps + 1 batches)");
        window.push_back(std::move(*batch));
    }
    PooledWindow initial = pool(window);
    const Normalizer normalizer = Normalizer::fit(initial.features);
    LinearClassifier classifier =
        train_logistic(initial.features, initial.labels, normalizer, config.train);

    KdeModel reference;
    if (config.policy == PolicyKind::EntropyTriggered) reference = fit_kde(initial.features);

    while (window.size() > config.window_steps) window.pop_front();

    EwmaState ewma(config.ewma);
    PolicyRunResult result;
    result.policy = config.policy;
    result.first_eval_step = config.init_steps;

    auto retrain = [&](std::size_t step) {
        PooledWindow pooled = pool(window);
        classifier = train_logistic(pooled.features, pooled.labels, normalizer, config.train);
        result.retrain_steps.push_back(step);
        if (config.policy == PolicyKind::EntropyTriggered) reference = fit_kde(pooled.features);
    };

    while (auto batch = stream.next()) {
        const std::size_t step = batch->step_index;
        auto [fit, eval] = split_batch(*batch, config.fit_fraction);
        const double loss = log_loss(classifier, eval);
        result.per_step_loss.push_back(loss);

        window.push_back(std::move(*batch));
        if (window.size() > config.window_steps) window.pop_front();

        switch (config.policy) {
            case PolicyKind::Never: break;
            case PolicyKind::EveryStep: retrain(step); break;
            case PolicyKind::EntropyTriggered: {
                const KdeModel current = fit_kde(fit.features);
                const double kl = kl_estimate(current, reference, fit.features);
                const EwmaUpdate update = ewma.update(kl);
                result.signal.push_back({kl, update.z, update.triggered});
                if (update.triggered) {
                    retrain(step);
                    if (config.ewma.reset_on_trigger) ewma.reset();
                }
                break;
            }
            case PolicyKind::PerformanceTriggered: {
                const EwmaUpdate update = ewma.update(loss);
                result.signal.push_back({loss, update.z, update.triggered});
                if (update.triggered) {
                    retrain(step);
                    if (config.ewma.reset_on_trigger) ewma.reset();
                }
                break;
            }
        }
    }

    if (result.per_step_loss.empty())
        throw std::runtime_error("run_policy: stream yielded no batches beyond the initial window");

    const std::size_t evaluated = result.per_step_loss.size();
    result.avg_loss =
        simd::sum(result.per_step_loss.data(), evaluated) / static_cast<double>(evaluated);
    result.retrain_count = result.retrain_steps.size();
    result.retrain_fraction =
        static_cast<double>(result.retrain_count) / static_cast<double>(evaluated);
    return result;
}

std::unique_ptr<DriftStream> make_stream(const StreamConfig& config) {
    return std::visit(
        [](const auto& cfg) -> std::unique_ptr<DriftStream> {
            using T = std::decay_t<decltype(cfg)>;
            if constexpr (std::is_same_v<T, SyntheticDriftConfig>) return synthetic_stream(cfg);
            else return csv_stream(cfg);
        },
        config);
}

std::size_t stream_dimension(const StreamConfig& config) {
    return make_stream(config)->dimension();
}

std::vector<PolicyRunResult> compare_policies(const StreamConfig& stream_config,
                                              const std::vector<RunConfig>& run_configs) {
    std::vector<PolicyRunResult> results;
    results.reserve(run_configs.size());
    for (const RunConfig& run : run_configs) {
        auto stream = make_stream(stream_config);
        results.push_back(run_policy(*stream, run));
    }
    return results;
}

}  // namespace driftwatch
