#pragma once

// The four retraining strategies and the per-step evaluation loop that runs
// them over a drift stream.

#include <string>
#include <variant>
#include <vector>

#include "driftwatch/alarm.hpp"
#include "driftwatch/core.hpp"
#include "driftwatch/model.hpp"
#include "driftwatch/streams.hpp"

namespace driftwatch {

enum class PolicyKind { Never, EveryStep, EntropyTriggered, PerformanceTriggered };

const char* policy_name(PolicyKind kind);
PolicyKind policy_from_name(const std::string& name);  // throws std::invalid_argument

struct RunConfig {
    PolicyKind policy = PolicyKind::Never;
    std::size_t window_steps = 30;  // rolling training window, in steps
    std::size_t init_steps = 30;    // initial training window, in steps
    EwmaConfig ewma{};
    TrainConfig train{};
    double fit_fraction = 0.5;

    void validate() const;
};

struct SignalSample {
    double value = 0.0;  // the monitored statistic (KL estimate or log loss)
    double z = 0.0;
    bool triggered = false;
};

struct PolicyRunResult {
    PolicyKind policy = PolicyKind::Never;
    std::size_t first_eval_step = 0;          // == init_steps
    std::vector<double> per_step_loss;        // one entry per evaluated step
    std::vector<std::size_t> retrain_steps;   // absolute step indices, increasing
    std::vector<SignalSample> signal;         // empty for Never / EveryStep
    double avg_loss = 0.0;
    std::size_t retrain_count = 0;
    double retrain_fraction = 0.0;

    std::size_t evaluated_steps() const { return per_step_loss.size(); }
};

// Runs one policy over the stream. Protocol per evaluated step, after the
// initial window: split the batch, score the eval split with the current
// classifier (loss always reflects the pre-retrain model), then apply the
// policy's monitoring / retraining rule on the rolling window. The
// normalizer is fit once on the initial window and frozen.
PolicyRunResult run_policy(DriftStream& stream, const RunConfig& config);

using StreamConfig = std::variant<SyntheticDriftConfig, CsvStreamConfig>;

std::unique_ptr<DriftStream> make_stream(const StreamConfig& config);
std::size_t stream_dimension(const StreamConfig& config);

// Runs each config on a freshly instantiated stream built from the same
// stream config, so every policy observes an identical batch sequence.
std::vector<PolicyRunResult> compare_policies(const StreamConfig& stream_config,
                                              const std::vector<RunConfig>& run_configs);

}  // namespace driftwatch
