#include "driftwatch/alarm.hpp"

#include <cmath>
#include <stdexcept>

namespace driftwatch {

double EwmaConfig::alpha() const { return 1.0 - std::exp2(-1.0 / half_life); }

void EwmaConfig::validate() const {
    if (!(half_life > 0.0) || !std::isfinite(half_life))
        throw std::invalid_argument("ewma.half_life must be a positive real");
    if (!(level > 0.0) || !std::isfinite(level))
        throw std::invalid_argument("ewma.level must be a positive real");
    if (!(epsilon > 0.0) || !std::isfinite(epsilon))
        throw std::invalid_argument("ewma.epsilon must be a positive real");
}

EwmaState::EwmaState(EwmaConfig config) : config_(config) {
    config_.validate();
    alpha_ = config_.alpha();
}

EwmaUpdate EwmaState::update(double sample) {
    if (!std::isfinite(sample)) throw std::invalid_argument("ewma update: non-finite sample");

    if (steps_seen_ == 0) {
        mean_ = sample;
        variance_ = 0.0;
    } else {
        mean_ = (1.0 - alpha_) * mean_ + alpha_ * sample;
        const double dev = sample - mean_;
        variance_ = (1.0 - alpha_) * variance_ + alpha_ * dev * dev;
    }

    EwmaUpdate out;
    out.z = (sample - mean_) / (std::sqrt(variance_) + config_.epsilon);
    out.triggered = out.z > config_.level && steps_seen_ >= config_.warmup_steps;
    ++steps_seen_;
    return out;
}

void EwmaState::reset() {
    mean_ = 0.0;
    variance_ = 0.0;
    steps_seen_ = 0;
}

}  // namespace driftwatch
