#include "driftwatch/density.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "driftwatch/simd.hpp"

namespace driftwatch {

double log_density_floor() {
    static const double floor_value = std::log(1e-300);
    return floor_value;
}

KdeModel KdeModel::build(const Matrix& points, std::vector<double> bandwidths) {
    const std::size_t m = points.rows();
    const std::size_t d = points.cols();
    KdeModel model;
    model.sample_count_ = m;
    model.columns_.reserve(d);
    for (std::size_t j = 0; j < d; ++j) model.columns_.push_back(points.column(j));

    model.bandwidths_ = std::move(bandwidths);
    model.inv_bandwidths_.resize(d);
    double log_h_sum = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        model.inv_bandwidths_[j] = 1.0 / model.bandwidths_[j];
        log_h_sum += std::log(model.bandwidths_[j]);
    }
    model.log_weight_ = -std::log(static_cast<double>(m)) -
                        0.5 * static_cast<double>(d) * std::log(2.0 * std::numbers::pi) -
                        log_h_sum;
    return model;
}

KdeModel fit_kde(const Matrix& points) {
    const std::size_t m = points.rows();
    const std::size_t d = points.cols();
    if (m == 0 || d == 0) throw std::invalid_argument("fit_kde: empty input");
    if (!points.all_finite()) throw std::invalid_argument("fit_kde: non-finite entries");

    std::vector<double> bandwidths(d);
    const double scaling = std::pow(static_cast<double>(m), -1.0 / (static_cast<double>(d) + 4.0));
    for (std::size_t j = 0; j < d; ++j) {
        const std::vector<double> col = points.column(j);
        double sd = 0.0;
        if (m >= 2) {
            const double mean = simd::sum(col.data(), m) / static_cast<double>(m);
            double ss = 0.0;
            for (double v : col) ss += (v - mean) * (v - mean);
            sd = std::sqrt(ss / static_cast<double>(m - 1));
        }
        double h = sd * scaling;
        if (!(h > 0.0)) h = kBandwidthFloor;
        bandwidths[j] = h;
    }
    return KdeModel::build(points, std::move(bandwidths));
}

KdeModel fit_kde_with_bandwidths(const Matrix& points, std::vector<double> bandwidths) {
    const std::size_t m = points.rows();
    const std::size_t d = points.cols();
    if (m == 0 || d == 0) throw std::invalid_argument("fit_kde: empty input");
    if (!points.all_finite()) throw std::invalid_argument("fit_kde: non-finite entries");
    if (bandwidths.size() != d) throw std::invalid_argument("fit_kde: bandwidth count mismatch");
    for (double h : bandwidths)
        if (!(h > 0.0) || !std::isfinite(h))
            throw std::invalid_argument("fit_kde: bandwidths must be positive and finite");
    return KdeModel::build(points, std::move(bandwidths));
}

double KdeModel::log_density(std::span<const double> x) const {
    const std::size_t d = dimension();
    const std::size_t m = sample_count_;
    if (x.size() != d) throw std::invalid_argument("log_density: dimension mismatch");

    // squared scaled distances to all samples, accumulated per dimension
    std::vector<double> sq(m, 0.0);
    for (std::size_t j = 0; j < d; ++j)
        simd::accumulate_scaled_sqdiff(sq.data(), columns_[j].data(), x[j], inv_bandwidths_[j], m);

    // log-sum-exp of the kernel exponents -sq/2
    for (std::size_t i = 0; i < m; ++i) sq[i] *= -0.5;
    const double peak = simd::max_value(sq.data(), m);
    for (std::size_t i = 0; i < m; ++i) sq[i] -= peak;
    simd::exp_apply(sq.data(), sq.data(), m);
    const double lse = peak + std::log(simd::sum(sq.data(), m));

    const double result = lse + log_weight_;
    const double floor_value = log_density_floor();
    return result < floor_value ? floor_value : result;
}

std::vector<double> KdeModel::log_density_rows(const Matrix& queries) const {
    std::vector<double> out;
    out.reserve(queries.rows());
    for (std::size_t r = 0; r < queries.rows(); ++r) out.push_back(log_density(queries.row(r)));
    return out;
}

double kl_estimate(const KdeModel& p_hat, const KdeModel& q_ref, const Matrix& eval_points) {
    const std::size_t n = eval_points.rows();
    if (n == 0) throw std::invalid_argument("kl_estimate: empty evaluation set");
    if (p_hat.dimension() != q_ref.dimension() || p_hat.dimension() != eval_points.cols())
        throw std::invalid_argument("kl_estimate: dimension mismatch");

    std::vector<double> diffs(n);
    for (std::size_t r = 0; r < n; ++r) {
        const auto row = eval_points.row(r);
        diffs[r] = p_hat.log_density(row) - q_ref.log_density(row);
    }
    return simd::sum(diffs.data(), n) / static_cast<double>(n);
}

}  // namespace driftwatch
