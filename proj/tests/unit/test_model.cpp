#include <doctest.h>

#include <cmath>

#include "driftwatch/model.hpp"
#include "support/oracles.hpp"

using namespace driftwatch;

namespace {

struct Dataset {
    Matrix features;
    std::vector<int> labels;
};

Dataset random_dataset(Rng& rng, std::size_t n, std::size_t d) {
    Dataset data;
    data.features = Matrix(n, d);
    data.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double score = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            data.features(i, j) = rng.normal();
            score += data.features(i, j);
        }
        data.labels[i] = rng.uniform() < 1.0 / (1.0 + std::exp(-score)) ? 1 : 0;
    }
    return data;
}

Normalizer identity_normalizer(std::size_t d) {
    // mean 0, sd 1 in every dimension: fit on +/- 1 rows
    Matrix window(2, d);
    for (std::size_t j = 0; j < d; ++j) {
        window(0, j) = -1.0;
        window(1, j) = 1.0;
    }
    return Normalizer::fit(window);
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("normalizer floors constant columns and rejects tiny windows") {
    const Matrix window = Matrix::from_rows({{5.0, 0.0}, {5.0, 2.0}, {5.0, 4.0}});
    const Normalizer norm = Normalizer::fit(window);
    CHECK(norm.stddev()[0] == 1e-8);
    CHECK(norm.mean()[0] == 5.0);

    double out[2];
    norm.apply(window.row(1), out);
    CHECK(out[0] == 0.0);  // in-window constant value maps to 0

    CHECK_THROWS_AS((void)Normalizer::fit(Matrix::from_rows({{1.0}})), std::invalid_argument);
}

TEST_CASE("normalizer on {0,2} gives mean 1 and std 1") {
    const Normalizer norm = Normalizer::fit(Matrix::from_rows({{0.0}, {2.0}}));
    CHECK(norm.mean()[0] == 1.0);
    CHECK(norm.stddev()[0] == 1.0);
}

TEST_CASE("normalized initial window has mean 0 and std 1 per column") {
    Rng rng(RngSeed{3});
    Matrix window(60, 3);
    for (std::size_t i = 0; i < 60; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            window(i, j) = 4.0 * rng.normal() + static_cast<double>(j);
    const Normalizer norm = Normalizer::fit(window);
    const Matrix z = norm.apply(window);
    for (std::size_t j = 0; j < 3; ++j) {
        const std::vector<double> col = z.column(j);
        CHECK(std::abs(oracles::mean_of(col)) < 1e-12);
        double ss = 0.0;
        for (double v : col) ss += v * v;
        CHECK(std::sqrt(ss / 60.0) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("analytic gradient matches central finite differences") {
    Rng rng(RngSeed{42});
    const Dataset data = random_dataset(rng, 20, 3);
    const Normalizer norm = identity_normalizer(3);
    const Matrix z = norm.apply(data.features);
    const double l2 = 1e-4;

    for (int rep = 0; rep < 10; ++rep) {
        std::vector<double> w(3);
        for (double& v : w) v = 2.0 * rng.normal();
        const double b = rng.normal();

        std::vector<double> grad_w(3);
        double grad_b = 0.0;
        logistic::gradient(z, data.labels, w, b, l2, grad_w, grad_b);

        const auto fd = oracles::fd_gradient(
            [&](const std::vector<double>& wv, double bv) {
                return logistic::objective(z, data.labels, wv, bv, l2);
            },
            w, b, 1e-5);

        for (std::size_t j = 0; j < 3; ++j) {
            const double scale = std::max(std::abs(fd.grad_w[j]), 1e-8);
            CHECK(std::abs(grad_w[j] - fd.grad_w[j]) / scale < 1e-5);
        }
        const double scale_b = std::max(std::abs(fd.grad_b), 1e-8);
        CHECK(std::abs(grad_b - fd.grad_b) / scale_b < 1e-5);
    }
}

TEST_CASE("single-class windows are trainable") {
    Rng rng(RngSeed{6});
    Matrix features(30, 2);
    std::vector<int> labels(30, 1);
    for (std::size_t i = 0; i < 30; ++i) {
        features(i, 0) = rng.normal();
        features(i, 1) = rng.normal();
    }
    const Normalizer norm = Normalizer::fit(features);
    const LinearClassifier model = train_logistic(features, labels, norm, TrainConfig{});
    for (std::size_t i = 0; i < 30; ++i) CHECK(model.predict_proba(features.row(i)) > 0.5);
}

TEST_CASE("linearly separable data trains to low loss") {
    Rng rng(RngSeed{7});
    Matrix features(40, 2);
    std::vector<int> labels(40);
    for (std::size_t i = 0; i < 40; ++i) {
        const int y = i % 2 == 0 ? 1 : 0;
        features(i, 0) = (y == 1 ? 3.0 : -3.0) + 0.5 * rng.normal();
        features(i, 1) = rng.normal();
        labels[i] = y;
    }
    const Normalizer norm = Normalizer::fit(features);
    TrainConfig config;
    config.max_iters = 2000;
    const LinearClassifier model = train_logistic(features, labels, norm, config);

    // cross-check the training loss against a direct objective evaluation
    const Matrix z = norm.apply(features);
    const double loss =
        logistic::objective(z, labels, model.weights(), model.bias(), config.l2);
    CHECK(loss < 0.1);
}

TEST_CASE("training is deterministic") {
    Rng rng(RngSeed{8});
    const Dataset data = random_dataset(rng, 50, 2);
    const Normalizer norm = Normalizer::fit(data.features);
    const LinearClassifier a = train_logistic(data.features, data.labels, norm, TrainConfig{});
    const LinearClassifier b = train_logistic(data.features, data.labels, norm, TrainConfig{});
    CHECK(a.weights() == b.weights());
    CHECK(a.bias() == b.bias());
}

TEST_CASE("objective decreases every iteration on the fixture set") {
    Rng rng(RngSeed{9});
    for (int rep = 0; rep < 3; ++rep) {
        const Dataset data = random_dataset(rng, 40, 2);
        const Normalizer norm = Normalizer::fit(data.features);
        std::vector<double> trace;
        (void)train_logistic(data.features, data.labels, norm, TrainConfig{}, &trace);
        REQUIRE(trace.size() > 2);
        for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] < trace[i - 1]);
    }
}

TEST_CASE("zero model predicts one half everywhere") {
    const LinearClassifier model({0.0, 0.0}, 0.0, identity_normalizer(2));
    Rng rng(RngSeed{10});
    for (int i = 0; i < 20; ++i) {
        const double x[2] = {5.0 * rng.normal(), 5.0 * rng.normal()};
        CHECK(model.predict_proba(x) == 0.5);
    }
}

TEST_CASE("zero activation along an ignored dimension gives one half") {
    const LinearClassifier model({1.0, 0.0}, 0.0, identity_normalizer(2));
    const double x[2] = {0.0, 123.0};
    CHECK(model.predict_proba(x) == 0.5);
}

TEST_CASE("extreme activations clamp strictly inside (0,1)") {
    const LinearClassifier model({100.0}, 0.0, identity_normalizer(1));
    const double hi[1] = {100.0};
    const double lo[1] = {-100.0};
    CHECK(model.predict_proba(hi) == 1.0 - kProbClamp);
    CHECK(model.predict_proba(lo) == kProbClamp);
}

TEST_CASE("predict_proba rejects dimension mismatch") {
    const LinearClassifier model({1.0, 2.0}, 0.0, identity_normalizer(2));
    const double x[1] = {0.0};
    CHECK_THROWS_AS((void)model.predict_proba(std::span<const double>(x, 1)),
                    std::invalid_argument);
}

TEST_CASE("log loss of the zero model is log 2") {
    const LinearClassifier model({0.0, 0.0}, 0.0, identity_normalizer(2));
    StreamBatch eval;
    eval.features = Matrix(7, 2);
    eval.labels = {0, 1, 1, 0, 1, 0, 0};
    Rng rng(RngSeed{11});
    for (std::size_t i = 0; i < 7; ++i) {
        eval.features(i, 0) = rng.normal();
        eval.features(i, 1) = rng.normal();
    }
    CHECK(std::abs(log_loss(model, eval) - std::log(2.0)) < 1e-12);
}

TEST_CASE("perfectly confident clamped predictions cost about 1e-12 per example") {
    const LinearClassifier model({100.0}, 0.0, identity_normalizer(1));
    StreamBatch eval;
    eval.features = Matrix::from_rows({{50.0}, {60.0}});
    eval.labels = {1, 1};
    const double loss = log_loss(model, eval);
    CHECK(loss == doctest::Approx(1e-12).epsilon(0.01));
}

TEST_CASE("log loss matches a hand-evaluated five-point formula") {
    const LinearClassifier model({0.8, -0.4}, 0.25, identity_normalizer(2));
    StreamBatch eval;
    eval.features =
        Matrix::from_rows({{0.2, 1.0}, {-1.0, 0.5}, {2.0, -0.3}, {0.0, 0.0}, {-0.7, -1.2}});
    eval.labels = {1, 0, 1, 0, 1};

    double expected = 0.0;
    for (std::size_t i = 0; i < 5; ++i) {
        const double a = 0.8 * eval.features(i, 0) - 0.4 * eval.features(i, 1) + 0.25;
        const double p = 1.0 / (1.0 + std::exp(-a));
        expected += eval.labels[i] == 1 ? -std::log(p) : -std::log(1.0 - p);
    }
    expected /= 5.0;
    CHECK(log_loss(model, eval) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("empty windows and eval batches are rejected") {
    const Normalizer norm = identity_normalizer(2);
    CHECK_THROWS_AS((void)train_logistic(Matrix(), {}, norm, TrainConfig{}),
                    std::invalid_argument);
    const LinearClassifier model({0.0, 0.0}, 0.0, norm);
    CHECK_THROWS_AS((void)log_loss(model, StreamBatch{}), std::invalid_argument);
}

}  // TEST_SUITE
