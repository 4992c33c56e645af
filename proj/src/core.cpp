#include "driftwatch/core.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace driftwatch {

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    Matrix m;
    m.rows_ = rows.size();
    m.cols_ = rows.size() == 0 ? 0 : rows.begin()->size();
    m.data_.reserve(m.rows_ * m.cols_);
    for (const auto& r : rows) {
        if (r.size() != m.cols_) throw std::invalid_argument("Matrix::from_rows: ragged rows");
        m.data_.insert(m.data_.end(), r.begin(), r.end());
    }
    return m;
}

std::vector<double> Matrix::column(std::size_t c) const {
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = data_[r * cols_ + c];
    return out;
}

Matrix Matrix::slice_rows(std::size_t begin, std::size_t end) const {
    Matrix out(end - begin, cols_);
    std::copy(data_.begin() + static_cast<std::ptrdiff_t>(begin * cols_),
              data_.begin() + static_cast<std::ptrdiff_t>(end * cols_), out.data_.begin());
    return out;
}

void Matrix::append_rows(const Matrix& other) {
    if (rows_ == 0 && cols_ == 0) {
        *this = other;
        return;
    }
    if (other.cols_ != cols_) throw std::invalid_argument("Matrix::append_rows: column mismatch");
    data_.insert(data_.end(), other.data_.begin(), other.data_.end());
    rows_ += other.rows_;
}

bool Matrix::all_finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

double Rng::normal() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    // u1 in (0,1] so the log is finite
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    cached_ = radius * std::sin(angle);
    has_cached_ = true;
    return radius * std::cos(angle);
}

std::pair<StreamBatch, StreamBatch> split_batch(const StreamBatch& batch, double fit_fraction) {
    const std::size_t n = batch.size();
    if (n < 2) throw std::invalid_argument("split_batch: batch must have at least 2 rows");
    if (!(fit_fraction > 0.0 && fit_fraction < 1.0))
        throw std::invalid_argument("split_batch: fit_fraction must lie in (0,1)");
    if (batch.labels.size() != n)
        throw std::invalid_argument("split_batch: label count does not match feature rows");

    std::size_t fit_rows =
        static_cast<std::size_t>(std::ceil(fit_fraction * static_cast<double>(n)));
    if (fit_rows >= n) fit_rows = n - 1;  // eval stays nonempty

    StreamBatch fit;
    fit.step_index = batch.step_index;
    fit.features = batch.features.slice_rows(0, fit_rows);
    fit.labels.assign(batch.labels.begin(), batch.labels.begin() + static_cast<std::ptrdiff_t>(fit_rows));

    StreamBatch eval;
    eval.step_index = batch.step_index;
    eval.features = batch.features.slice_rows(fit_rows, n);
    eval.labels.assign(batch.labels.begin() + static_cast<std::ptrdiff_t>(fit_rows), batch.labels.end());

    return {std::move(fit), std::move(eval)};
}

}  // namespace driftwatch
