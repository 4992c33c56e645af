#pragma once

// EWMA mean/variance tracker with a one-sided standardized-deviation trigger.

#include <cstddef>

namespace driftwatch {

struct EwmaConfig {
    double half_life = 50.0;   // h, in updates
    double level = 2.0;        // trigger threshold k
    double epsilon = 1e-12;    // numerical stabilizer in the denominator
    std::size_t warmup_steps = 10;
    bool reset_on_trigger = true;

    // alpha = 1 - 2^(-1/h), in (0,1) for any positive half-life.
    double alpha() const;
    void validate() const;  // throws std::invalid_argument
};

struct EwmaUpdate {
    double z = 0.0;
    bool triggered = false;
};

// Running state for one monitored scalar signal. The first update after
// construction or reset initializes mean = sample, variance = 0 (so its z
// is 0); subsequent updates apply
//   mu <- (1-alpha) mu + alpha s
//   v  <- (1-alpha) v  + alpha (s - mu)^2     (uses the updated mu)
//   z  =  (s - mu) / (sqrt(v) + epsilon)
// and trigger when z > level, strictly, once warmup_steps updates have been
// absorbed.
class EwmaState {
public:
    explicit EwmaState(EwmaConfig config);

    EwmaUpdate update(double sample);  // throws on non-finite input
    void reset();

    double mean() const { return mean_; }
    double variance() const { return variance_; }
    std::size_t steps_seen() const { return steps_seen_; }
    const EwmaConfig& config() const { return config_; }

private:
    EwmaConfig config_;
    double alpha_ = 0.0;
    double mean_ = 0.0;
    double variance_ = 0.0;
    std::size_t steps_seen_ = 0;
};

}  // namespace driftwatch
