#pragma once

// Frozen z-score normalizer, from-scratch logistic-regression trainer, and
// online Bernoulli log loss.

#include <span>
#include <vector>

#include "driftwatch/core.hpp"

namespace driftwatch {

// Per-dimension mean and population standard deviation of the initial
// training window. Never refit after construction: retraining reuses the
// same instance.
class Normalizer {
public:
    static Normalizer fit(const Matrix& window);  // window must have >= 2 rows

    std::size_t dimension() const { return mean_.size(); }
    const std::vector<double>& mean() const { return mean_; }
    const std::vector<double>& stddev() const { return std_; }

    void apply(std::span<const double> x, std::span<double> out) const;
    Matrix apply(const Matrix& features) const;

private:
    std::vector<double> mean_;
    std::vector<double> std_;  // floored at 1e-8
};

struct TrainConfig {
    double l2 = 1e-4;
    std::size_t max_iters = 500;
    double learning_rate = 0.1;
    double grad_tol = 1e-6;

    void validate() const;
};

// Probabilities from predict_proba are clamped into this range so log loss
// stays finite.
inline constexpr double kProbClamp = 1e-12;

class LinearClassifier {
public:
    LinearClassifier(std::vector<double> weights, double bias, Normalizer normalizer)
        : weights_(std::move(weights)), bias_(bias), normalizer_(std::move(normalizer)) {}

    const std::vector<double>& weights() const { return weights_; }
    double bias() const { return bias_; }
    const Normalizer& normalizer() const { return normalizer_; }

    // sigma(w . z + b) on the normalized input, clamped to
    // [kProbClamp, 1 - kProbClamp].
    double predict_proba(std::span<const double> x) const;

private:
    std::vector<double> weights_;
    double bias_ = 0.0;
    Normalizer normalizer_;
};

namespace logistic {

// Mean Bernoulli log loss + (l2/2)|w|^2 over already-normalized features.
// The bias is not penalized. Uses the logits formulation, so it is smooth
// (no probability clamping) and suitable for finite-difference checks.
double objective(const Matrix& z_features, const std::vector<int>& labels,
                 std::span<const double> weights, double bias, double l2);

// Analytic gradient of the objective above.
void gradient(const Matrix& z_features, const std::vector<int>& labels,
              std::span<const double> weights, double bias, double l2,
              std::span<double> grad_w, double& grad_b);

}  // namespace logistic

// Full-batch gradient descent from w = 0, b = 0. Deterministic: fixed
// learning rate, stops at max_iters or when the gradient infinity-norm
// drops below grad_tol. The normalizer is used as-is (frozen). If
// objective_trace is non-null the objective value before each accepted step
// is appended to it.
LinearClassifier train_logistic(const Matrix& features, const std::vector<int>& labels,
                                const Normalizer& normalizer, const TrainConfig& config,
                                std::vector<double>* objective_trace = nullptr);

// Mean over eval rows of -[y log p + (1-y) log(1-p)] with clamped p.
double log_loss(const LinearClassifier& model, const StreamBatch& eval);

}  // namespace driftwatch
