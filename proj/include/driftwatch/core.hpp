#pragma once

// Shared value types for the streaming toolkit: dense row-major matrices,
// seeded random generation, stream batches, and the drift-stream interface.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace driftwatch {

// Dense row-major matrix of doubles. Plain value type; rows are contiguous.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    // Copy of column c (rows are the fast axis in storage).
    std::vector<double> column(std::size_t c) const;

    // Rows [begin, end) as a new matrix.
    Matrix slice_rows(std::size_t begin, std::size_t end) const;

    void append_rows(const Matrix& other);

    bool all_finite() const;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

struct RngSeed {
    std::uint64_t value = 42;
};

// Deterministic generator: mt19937_64 with explicit uniform/normal transforms
// so sequences are identical across standard libraries (std distributions are
// implementation-defined).
class Rng {
public:
    explicit Rng(RngSeed seed) : engine_(seed.value) {}
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller (second draw cached).
    double normal();

private:
    std::mt19937_64 engine_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

// One discrete time step of a stream: feature rows plus binary labels.
struct StreamBatch {
    std::size_t step_index = 0;
    Matrix features;          // batch_size x d
    std::vector<int> labels;  // values in {0,1}, size == features.rows()

    std::size_t size() const { return features.rows(); }
};

// Sequential source of batches with strictly increasing step_index.
class DriftStream {
public:
    virtual ~DriftStream() = default;
    virtual std::size_t dimension() const = 0;
    virtual std::optional<StreamBatch> next() = 0;
};

// Deterministic prefix/suffix split: fit gets min(ceil(fit_fraction*n), n-1)
// rows, eval the rest. Throws std::invalid_argument for batches with fewer
// than 2 rows or fractions outside (0,1).
std::pair<StreamBatch, StreamBatch> split_batch(const StreamBatch& batch, double fit_fraction);

}  // namespace driftwatch
