#pragma once

// Product-Gaussian kernel density estimation and the streaming empirical
// KL estimator built on top of it.

#include <span>
#include <vector>

#include "driftwatch/core.hpp"

namespace driftwatch {

// Fitted KDE: one Gaussian kernel per stored sample with per-dimension
// bandwidths from Scott's rule, h_j = sd_j * m^(-1/(d+4)). Immutable after
// fit; evaluation is reentrant.
class KdeModel {
public:
    std::size_t dimension() const { return columns_.size(); }
    std::size_t sample_count() const { return sample_count_; }
    const std::vector<double>& bandwidths() const { return bandwidths_; }

    // Stored fit point, exactly as passed to fit_kde.
    double sample(std::size_t i, std::size_t j) const { return columns_[j][i]; }

    // log( (1/m) sum_i prod_j N(x_j; sample_ij, h_j^2) ), evaluated in
    // log-space. Result is floored at log(1e-300), so it is finite for
    // every finite query.
    double log_density(std::span<const double> x) const;

    // One query per row of `queries`; results appended order-preserving.
    std::vector<double> log_density_rows(const Matrix& queries) const;

private:
    friend KdeModel fit_kde(const Matrix& points);
    friend KdeModel fit_kde_with_bandwidths(const Matrix& points, std::vector<double> bandwidths);

    static KdeModel build(const Matrix& points, std::vector<double> bandwidths);

    std::vector<std::vector<double>> columns_;  // d columns of length m
    std::vector<double> bandwidths_;
    std::vector<double> inv_bandwidths_;
    std::size_t sample_count_ = 0;
    double log_weight_ = 0.0;  // -log m - (d/2) log(2 pi) - sum_j log h_j
};

// Bandwidth used when a dimension has zero sample spread.
inline constexpr double kBandwidthFloor = 1e-3;

// Lower bound applied to log_density results, log(1e-300).
double log_density_floor();

// Fit on m x d points, m >= 1. Throws std::invalid_argument on empty or
// non-finite input.
KdeModel fit_kde(const Matrix& points);

// Same, but with caller-chosen per-dimension bandwidths (all positive).
KdeModel fit_kde_with_bandwidths(const Matrix& points, std::vector<double> bandwidths);

// Mean over eval_points rows of log p_hat(x) - log q_ref(x). May be
// negative; exactly antisymmetric under exchanging p_hat and q_ref.
double kl_estimate(const KdeModel& p_hat, const KdeModel& q_ref, const Matrix& eval_points);

}  // namespace driftwatch
