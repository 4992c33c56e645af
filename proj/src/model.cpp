#include "driftwatch/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "driftwatch/simd.hpp"

namespace driftwatch {

namespace {

constexpr double kStdFloor = 1e-8;

inline double clamp_proba(double p) {
    return std::clamp(p, kProbClamp, 1.0 - kProbClamp);
}

// Shared evaluation state: normalized features in column-major layout so the
// per-row activation loop runs over contiguous memory.
struct LogisticProblem {
    std::vector<std::vector<double>> columns;  // d columns of length n
    std::vector<double> targets;               // labels as doubles
    std::size_t n = 0;
    std::size_t d = 0;

    LogisticProblem(const Matrix& z_features, const std::vector<int>& labels) {
        n = z_features.rows();
        d = z_features.cols();
        columns.reserve(d);
        for (std::size_t j = 0; j < d; ++j) columns.push_back(z_features.column(j));
        targets.reserve(n);
        for (int y : labels) targets.push_back(static_cast<double>(y));
    }

    void activations(std::span<const double> w, double b, std::vector<double>& z) const {
        z.assign(n, b);
        for (std::size_t j = 0; j < d; ++j) simd::axpy(z.data(), w[j], columns[j].data(), n);
    }

    double objective(std::span<const double> w, double b, double l2,
                     std::vector<double>& z, std::vector<double>& scratch) const {
        activations(w, b, z);
        // softplus(z) - y z, evaluated as log1p(exp(-|z|)) + max(z,0) - y z
        scratch.resize(n);
        for (std::size_t i = 0; i < n; ++i) scratch[i] = -std::abs(z[i]);
        simd::exp_apply(scratch.data(), scratch.data(), n);
        double loss = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            loss += std::log1p(scratch[i]) + std::max(z[i], 0.0) - targets[i] * z[i];
        loss /= static_cast<double>(n);
        double reg = 0.0;
        for (std::size_t j = 0; j < d; ++j) reg += w[j] * w[j];
        return loss + 0.5 * l2 * reg;
    }

    void gradient(std::span<const double> w, double b, double l2, std::span<double> grad_w,
                  double& grad_b, std::vector<double>& z, std::vector<double>& scratch) const {
        activations(w, b, z);
        // residual p - y with p = sigma(z) = e / (1 + e), e = exp(-|z|)
        scratch.resize(n);
        for (std::size_t i = 0; i < n; ++i) scratch[i] = -std::abs(z[i]);
        simd::exp_apply(scratch.data(), scratch.data(), n);
        for (std::size_t i = 0; i < n; ++i) {
            const double e = scratch[i];
            const double p = z[i] >= 0.0 ? 1.0 / (1.0 + e) : e / (1.0 + e);
            scratch[i] = p - targets[i];
        }
        const double inv_n = 1.0 / static_cast<double>(n);
        for (std::size_t j = 0; j < d; ++j)
            grad_w[j] = simd::dot(scratch.data(), columns[j].data(), n) * inv_n + l2 * w[j];
        grad_b = simd::sum(scratch.data(), n) * inv_n;
    }
};

}  // namespace

Normalizer Normalizer::fit(const Matrix& window) {
    const std::size_t m = window.rows();
    const std::size_t d = window.cols();
    if (m < 2) throw std::invalid_argument("Normalizer::fit: window must have at least 2 rows");
    if (!window.all_finite()) throw std::invalid_argument("Normalizer::fit: non-finite entries");

    Normalizer norm;
    norm.mean_.resize(d);
    norm.std_.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
        const std::vector<double> col = window.column(j);
        const double mean = simd::sum(col.data(), m) / static_cast<double>(m);
        double ss = 0.0;
        for (double v : col) ss += (v - mean) * (v - mean);
        const double sd = std::sqrt(ss / static_cast<double>(m));  // population
        norm.mean_[j] = mean;
        norm.std_[j] = std::max(sd, kStdFloor);
    }
    return norm;
}

void Normalizer::apply(std::span<const double> x, std::span<double> out) const {
    if (x.size() != mean_.size())
        throw std::invalid_argument("Normalizer::apply: dimension mismatch");
    for (std::size_t j = 0; j < mean_.size(); ++j) out[j] = (x[j] - mean_[j]) / std_[j];
}

Matrix Normalizer::apply(const Matrix& features) const {
    Matrix out(features.rows(), features.cols());
    for (std::size_t r = 0; r < features.rows(); ++r) apply(features.row(r), out.row(r));
    return out;
}

void TrainConfig::validate() const {
    if (!(l2 >= 0.0) || !std::isfinite(l2))
        throw std::invalid_argument("train.l2 must be a nonnegative real");
    if (max_iters == 0) throw std::invalid_argument("train.max_iters must be positive");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
        throw std::invalid_argument("train.learning_rate must be a positive real");
    if (!(grad_tol > 0.0) || !std::isfinite(grad_tol))
        throw std::invalid_argument("train.grad_tol must be a positive real");
}

double LinearClassifier::predict_proba(std::span<const double> x) const {
    if (x.size() != weights_.size())
        throw std::invalid_argument("predict_proba: dimension mismatch");
    std::vector<double> z(x.size());
    normalizer_.apply(x, z);
    const double a = simd::dot(weights_.data(), z.data(), z.size()) + bias_;
    const double p = a >= 0.0 ? 1.0 / (1.0 + std::exp(-a)) : std::exp(a) / (1.0 + std::exp(a));
    return clamp_proba(p);
}

namespace logistic {

double objective(const Matrix& z_features, const std::vector<int>& labels,
                 std::span<const double> weights, double bias, double l2) {
    LogisticProblem problem(z_features, labels);
    std::vector<double> z, scratch;
    return problem.objective(weights, bias, l2, z, scratch);
}

void gradient(const Matrix& z_features, const std::vector<int>& labels,
              std::span<const double> weights, double bias, double l2,
              std::span<double> grad_w, double& grad_b) {
    LogisticProblem problem(z_features, labels);
    std::vector<double> z, scratch;
    problem.gradient(weights, bias, l2, grad_w, grad_b, z, scratch);
}

}  // namespace logistic

LinearClassifier train_logistic(const Matrix& features, const std::vector<int>& labels,
                                const Normalizer& normalizer, const TrainConfig& config,
                                std::vector<double>* objective_trace) {
    config.validate();
    if (features.rows() == 0) throw std::invalid_argument("train_logistic: empty window");
    if (features.rows() != labels.size())
        throw std::invalid_argument("train_logistic: label count does not match feature rows");
    if (!features.all_finite()) throw std::invalid_argument("train_logistic: non-finite features");

    const Matrix z_features = normalizer.apply(features);
    const LogisticProblem problem(z_features, labels);
    const std::size_t d = problem.d;

    std::vector<double> w(d, 0.0);
    double b = 0.0;
    std::vector<double> grad_w(d, 0.0);
    double grad_b = 0.0;
    std::vector<double> z, scratch;

    for (std::size_t iter = 0; iter < config.max_iters; ++iter) {
        if (objective_trace != nullptr)
            objective_trace->push_back(problem.objective(w, b, config.l2, z, scratch));
        problem.gradient(w, b, config.l2, grad_w, grad_b, z, scratch);
        double grad_inf = std::abs(grad_b);
        for (double g : grad_w) grad_inf = std::max(grad_inf, std::abs(g));
        if (grad_inf < config.grad_tol) break;
        for (std::size_t j = 0; j < d; ++j) w[j] -= config.learning_rate * grad_w[j];
        b -= config.learning_rate * grad_b;
    }

    return LinearClassifier(std::move(w), b, normalizer);
}

double log_loss(const LinearClassifier& model, const StreamBatch& eval) {
    const std::size_t n = eval.size();
    if (n == 0) throw std::invalid_argument("log_loss: empty evaluation batch");
    if (eval.labels.size() != n)
        throw std::invalid_argument("log_loss: label count does not match feature rows");

    std::vector<double> losses(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double p = model.predict_proba(eval.features.row(i));
        losses[i] = eval.labels[i] == 1 ? -std::log(p) : -std::log(1.0 - p);
    }
    return simd::sum(losses.data(), n) / static_cast<double>(n);
}

}  // namespace driftwatch
