#include <doctest.h>

#include <cmath>

#include "driftwatch/alarm.hpp"
#include "driftwatch/core.hpp"
#include "support/oracles.hpp"

using namespace driftwatch;

namespace {

// 200 standard-normal draws followed by a jump to +10 held for 5 steps.
std::vector<double> jump_signal() {
    Rng rng(RngSeed{42});
    std::vector<double> signal;
    for (int i = 0; i < 200; ++i) signal.push_back(rng.normal());
    for (int i = 0; i < 5; ++i) signal.push_back(10.0);
    return signal;
}

}  // namespace

TEST_SUITE("alarm") {

TEST_CASE("half-life of one gives alpha exactly one half") {
    EwmaConfig config;
    config.half_life = 1.0;
    CHECK(config.alpha() == 0.5);
}

TEST_CASE("alpha stays in (0,1) across half-lives") {
    for (double h : {0.1, 1.0, 5.0, 50.0, 1e4}) {
        EwmaConfig config;
        config.half_life = h;
        CHECK(config.alpha() > 0.0);
        CHECK(config.alpha() < 1.0);
    }
}

TEST_CASE("constant signal never triggers and keeps z at zero") {
    EwmaState state(EwmaConfig{});
    for (int i = 0; i < 500; ++i) {
        const EwmaUpdate update = state.update(3.75);
        CHECK(update.z == 0.0);
        CHECK(!update.triggered);
    }
    CHECK(state.mean() == 3.75);
    CHECK(state.variance() == 0.0);
}

TEST_CASE("jump fixture triggers within five post-jump steps") {
    const std::vector<double> signal = jump_signal();

    // noise may fire the alarm while the variance estimate is still young;
    // the fixture's claim is that the jump itself is caught within 5 steps
    EwmaState state(EwmaConfig{});
    bool caught_jump = false;
    for (std::size_t t = 0; t < signal.size(); ++t) {
        const bool triggered = state.update(signal[t]).triggered;
        if (triggered && t >= 200 && t < 205) caught_jump = true;
    }
    CHECK(caught_jump);

    // the recursion is the oracle: an independent scripted replay must
    // produce the identical trigger sequence
    const oracles::EwmaReplay replay = oracles::ewma_replay(signal, 50.0, 2.0, 1e-12, 10);
    EwmaState again(EwmaConfig{});
    for (std::size_t t = 0; t < signal.size(); ++t) {
        const EwmaUpdate update = again.update(signal[t]);
        CHECK(update.z == doctest::Approx(replay.z[t]).epsilon(1e-12));
        CHECK(update.triggered == replay.triggered[t]);
    }
}

TEST_CASE("variance stays nonnegative on random signals") {
    Rng rng(RngSeed{17});
    EwmaState state(EwmaConfig{});
    for (int i = 0; i < 2000; ++i) {
        state.update(100.0 * rng.normal());
        CHECK(state.variance() >= 0.0);
    }
}

TEST_CASE("trigger sequence is invariant under positive rescaling") {
    Rng rng(RngSeed{23});
    std::vector<double> signal;
    for (int i = 0; i < 300; ++i)
        signal.push_back(5.0 + rng.normal() + (i % 37 == 0 ? 4.0 : 0.0));

    auto trigger_pattern = [](const std::vector<double>& s, double scale) {
        EwmaState state(EwmaConfig{});
        std::vector<bool> out;
        double min_sqrt_v = 1e300;
        for (std::size_t t = 0; t < s.size(); ++t) {
            out.push_back(state.update(scale * s[t]).triggered);
            if (t > 0) min_sqrt_v = std::min(min_sqrt_v, std::sqrt(state.variance()));
        }
        REQUIRE(min_sqrt_v * scale > 1e-6);  // precondition of the property
        return out;
    };

    const auto base = trigger_pattern(signal, 1.0);
    for (double c : {0.5, 2.0, 10.0}) CHECK(trigger_pattern(signal, c) == base);
}

TEST_CASE("large negative excursions never trigger") {
    Rng rng(RngSeed{29});
    EwmaState state(EwmaConfig{});
    for (int i = 0; i < 100; ++i) state.update(rng.normal());
    for (int i = 0; i < 10; ++i) {
        const EwmaUpdate update = state.update(-50.0);
        CHECK(update.z < 0.0);
        CHECK(!update.triggered);
    }
}

TEST_CASE("z exactly at the level does not trigger") {
    // capture a z value from a replayed run, then rerun with level == z;
    // the recomputed z is bit-identical, so the comparison is exactly z > z
    const std::vector<double> signal = jump_signal();
    EwmaState probe(EwmaConfig{});
    double captured_z = 0.0;
    for (std::size_t t = 0; t < 203; ++t) captured_z = probe.update(signal[t]).z;
    REQUIRE(captured_z > 0.0);

    EwmaConfig tuned;
    tuned.level = captured_z;
    EwmaState state(tuned);
    for (std::size_t t = 0; t < 202; ++t) state.update(signal[t]);
    const EwmaUpdate at_level = state.update(signal[202]);
    CHECK(at_level.z == captured_z);
    CHECK(!at_level.triggered);
}

TEST_CASE("reset clears the state and re-enters warmup") {
    EwmaState state(EwmaConfig{});
    Rng rng(RngSeed{31});
    for (int i = 0; i < 50; ++i) state.update(rng.normal());
    state.reset();
    CHECK(state.steps_seen() == 0);

    const EwmaUpdate first = state.update(2.5);
    CHECK(state.mean() == 2.5);
    CHECK(state.variance() == 0.0);
    CHECK(first.z == 0.0);

    // warmup gate: huge spikes right after reset stay suppressed
    state.reset();
    for (std::size_t i = 0; i < state.config().warmup_steps; ++i) {
        const EwmaUpdate update = state.update(i % 2 == 0 ? 1e6 : -1e6);
        CHECK(!update.triggered);
    }
}

TEST_CASE("non-finite samples and bad configs are rejected") {
    EwmaState state(EwmaConfig{});
    CHECK_THROWS_AS((void)state.update(std::nan("")), std::invalid_argument);
    CHECK_THROWS_AS((void)state.update(std::numeric_limits<double>::infinity()),
                    std::invalid_argument);

    EwmaConfig bad;
    bad.half_life = 0.0;
    CHECK_THROWS_AS(EwmaState{bad}, std::invalid_argument);
    bad = EwmaConfig{};
    bad.epsilon = -1.0;
    CHECK_THROWS_AS(EwmaState{bad}, std::invalid_argument);
}

}  // TEST_SUITE
