#include "driftwatch/streams.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "driftwatch/csv.hpp"

namespace driftwatch {

namespace {

double sigmoid(double a) {
    return a >= 0.0 ? 1.0 / (1.0 + std::exp(-a)) : std::exp(a) / (1.0 + std::exp(a));
}

class SyntheticStream final : public DriftStream {
public:
    explicit SyntheticStream(const SyntheticDriftConfig& config)
        : config_(config), rng_(config.seed) {}

    std::size_t dimension() const override { return 2; }

    std::optional<StreamBatch> next() override {
        if (step_ >= config_.steps) return std::nullopt;
        const double t = static_cast<double>(step_);
        const double mu0 = config_.initial_mean[0] + t * config_.mean_velocity[0];
        const double mu1 = config_.initial_mean[1] + t * config_.mean_velocity[1];
        const double sigma = config_.initial_std + t * config_.variance_growth;
        const double theta = t * config_.boundary_rotation;
        const double w0 = std::cos(theta);
        const double w1 = std::sin(theta);

        StreamBatch batch;
        batch.step_index = step_;
        batch.features = Matrix(config_.batch_size, 2);
        batch.labels.resize(config_.batch_size);
        for (std::size_t i = 0; i < config_.batch_size; ++i) {
            const double g0 = rng_.normal();
            const double g1 = rng_.normal();
            const double x0 = mu0 + sigma * g0;
            const double x1 = mu1 + sigma * g1;
            batch.features(i, 0) = x0;
            batch.features(i, 1) = x1;
            const double p =
                sigmoid(config_.label_sharpness * (w0 * (x0 - mu0) + w1 * (x1 - mu1)));
            batch.labels[i] = rng_.uniform() < p ? 1 : 0;
        }
        ++step_;
        return batch;
    }

private:
    SyntheticDriftConfig config_;
    Rng rng_;
    std::size_t step_ = 0;
};

struct DateParts {
    int year;
    unsigned month;
    unsigned day;
};

// Days since 1970-01-01 (Hinnant's civil-days algorithm).
long days_from_civil(const DateParts& d) {
    int y = d.year;
    y -= d.month <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (d.month + (d.month > 2 ? -3u : 9u)) + 2) / 5 + d.day - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return static_cast<long>(era) * 146097 + static_cast<long>(doe) - 719468;
}

DateParts parse_iso_date(const std::string& cell, std::size_t file_row) {
    auto fail = [&] {
        throw std::runtime_error("csv: invalid ISO-8601 date at row " + std::to_string(file_row) +
                                 ": '" + cell + "'");
    };
    if (cell.size() != 10 || cell[4] != '-' || cell[7] != '-') fail();
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
        if (cell[i] < '0' || cell[i] > '9') fail();
    DateParts d;
    d.year = std::stoi(cell.substr(0, 4));
    d.month = static_cast<unsigned>(std::stoi(cell.substr(5, 2)));
    d.day = static_cast<unsigned>(std::stoi(cell.substr(8, 2)));
    if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > 31) fail();
    return d;
}

double rolling_mean(const std::vector<double>& v, std::size_t end_incl, std::size_t window) {
    double acc = 0.0;
    for (std::size_t k = end_incl + 1 - window; k <= end_incl; ++k) acc += v[k];
    return acc / static_cast<double>(window);
}

// Population standard deviation over v[end-window+1 .. end].
double rolling_std(const std::vector<double>& v, std::size_t end_incl, std::size_t window) {
    const double mean = rolling_mean(v, end_incl, window);
    double ss = 0.0;
    for (std::size_t k = end_incl + 1 - window; k <= end_incl; ++k)
        ss += (v[k] - mean) * (v[k] - mean);
    return std::sqrt(ss / static_cast<double>(window));
}

// 14-period Wilder RSI; rsi[i] valid for i >= 14. Constant stretches give
// 50, gain-only stretches 100, loss-only stretches 0.
std::vector<double> wilder_rsi(const std::vector<double>& close) {
    constexpr std::size_t period = 14;
    const std::size_t n = close.size();
    std::vector<double> rsi(n, 0.0);
    if (n <= period) return rsi;

    double avg_gain = 0.0;
    double avg_loss = 0.0;
    for (std::size_t i = 1; i <= period; ++i) {
        const double change = close[i] - close[i - 1];
        avg_gain += std::max(change, 0.0);
        avg_loss += std::max(-change, 0.0);
    }
    avg_gain /= static_cast<double>(period);
    avg_loss /= static_cast<double>(period);

    auto to_rsi = [](double gain, double loss) {
        if (gain == 0.0 && loss == 0.0) return 50.0;
        if (loss == 0.0) return 100.0;
        if (gain == 0.0) return 0.0;
        return 100.0 - 100.0 / (1.0 + gain / loss);
    };

    rsi[period] = to_rsi(avg_gain, avg_loss);
    for (std::size_t i = period + 1; i < n; ++i) {
        const double change = close[i] - close[i - 1];
        avg_gain = (avg_gain * (period - 1) + std::max(change, 0.0)) / period;
        avg_loss = (avg_loss * (period - 1) + std::max(-change, 0.0)) / period;
        rsi[i] = to_rsi(avg_gain, avg_loss);
    }
    return rsi;
}

class VectorStream final : public DriftStream {
public:
    VectorStream(std::vector<StreamBatch> batches, std::size_t dim)
        : batches_(std::move(batches)), dim_(dim) {}

    std::size_t dimension() const override { return dim_; }

    std::optional<StreamBatch> next() override {
        if (pos_ >= batches_.size()) return std::nullopt;
        return batches_[pos_++];
    }

private:
    std::vector<StreamBatch> batches_;
    std::size_t dim_;
    std::size_t pos_ = 0;
};

std::vector<StreamBatch> chunk_rows(const Matrix& features, const std::vector<int>& labels,
                                    std::size_t batch_size) {
    std::vector<StreamBatch> batches;
    const std::size_t full = features.rows() / batch_size;  // final partial batch dropped
    batches.reserve(full);
    for (std::size_t b = 0; b < full; ++b) {
        StreamBatch batch;
        batch.step_index = b;
        batch.features = features.slice_rows(b * batch_size, (b + 1) * batch_size);
        batch.labels.assign(labels.begin() + static_cast<std::ptrdiff_t>(b * batch_size),
                            labels.begin() + static_cast<std::ptrdiff_t>((b + 1) * batch_size));
        batches.push_back(std::move(batch));
    }
    return batches;
}

struct ParsedSeries {
    std::vector<long> days;     // civil days, strictly ascending
    std::vector<double> value;  // the target_column values
};

ParsedSeries parse_dated_series(const CsvTable& table, const std::string& value_column) {
    const std::size_t date_col = table.column_index("date");
    const std::size_t value_col = table.column_index(value_column);
    ParsedSeries series;
    series.days.reserve(table.rows.size());
    series.value.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const std::size_t file_row = r + 2;
        const DateParts date = parse_iso_date(table.rows[r][date_col], file_row);
        const long day = days_from_civil(date);
        if (!series.days.empty() && day <= series.days.back())
            throw std::runtime_error("csv: rows must be in ascending date order (row " +
                                     std::to_string(file_row) + ")");
        series.days.push_back(day);
        series.value.push_back(parse_numeric_cell(table, r, value_col));
    }
    return series;
}

std::unique_ptr<DriftStream> build_finance_stream(const CsvStreamConfig& config,
                                                  const CsvTable& table) {
    const std::string value_column =
        config.target_column.empty() ? std::string("close") : config.target_column;
    const ParsedSeries series = parse_dated_series(table, value_column);
    const std::vector<double>& close = series.value;
    const std::size_t n = close.size();
    for (std::size_t i = 0; i < n; ++i)
        if (!(close[i] > 0.0))
            throw std::runtime_error("csv: non-positive price at row " + std::to_string(i + 2));

    const std::size_t w = config.rolling_window;
    const std::size_t first = std::max<std::size_t>(w, 14);
    if (n < first + 2)
        throw std::runtime_error("csv: too few rows for the finance recipe (need at least " +
                                 std::to_string(first + 2) + ", got " + std::to_string(n) + ")");

    std::vector<double> ret(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) ret[i] = close[i] / close[i - 1] - 1.0;
    const std::vector<double> rsi = wilder_rsi(close);

    const std::size_t rows = n - 1 - first;  // valid i in [first, n-2]
    Matrix features(rows, 4);
    std::vector<int> labels(rows);
    for (std::size_t i = first; i + 1 < n; ++i) {
        const std::size_t r = i - first;
        features(r, 0) = ret[i];
        features(r, 1) = rolling_std(ret, i, w);
        features(r, 2) = rsi[i];
        features(r, 3) = close[i] / close[i - w] - 1.0;
        labels[r] = ret[i + 1] > 0.0 ? 1 : 0;
    }
    if (!features.all_finite())
        throw std::runtime_error("csv: finance recipe produced non-finite features");

    auto batches = chunk_rows(features, labels, config.batch_size);
    if (batches.empty())
        throw std::runtime_error("csv: too few rows to fill one batch of size " +
                                 std::to_string(config.batch_size));
    return std::make_unique<VectorStream>(std::move(batches), 4);
}

std::unique_ptr<DriftStream> build_pageviews_stream(const CsvStreamConfig& config,
                                                    const CsvTable& table) {
    const std::string value_column =
        config.target_column.empty() ? std::string("views") : config.target_column;
    const ParsedSeries series = parse_dated_series(table, value_column);
    const std::size_t n = series.value.size();
    for (std::size_t i = 0; i < n; ++i)
        if (!(series.value[i] >= 0.0))
            throw std::runtime_error("csv: negative view count at row " + std::to_string(i + 2));

    const std::size_t w = config.rolling_window;
    if (n < w + 2)
        throw std::runtime_error("csv: too few rows for the pageviews recipe (need at least " +
                                 std::to_string(w + 2) + ", got " + std::to_string(n) + ")");

    std::vector<double> log_views(n);
    for (std::size_t i = 0; i < n; ++i) log_views[i] = std::log1p(series.value[i]);

    constexpr double two_pi = 6.283185307179586476925286766559;
    const std::size_t rows = n - 1 - w;  // valid i in [w, n-2]
    Matrix features(rows, 6);
    std::vector<int> labels(rows);
    for (std::size_t i = w; i + 1 < n; ++i) {
        const std::size_t r = i - w;
        const double mean = rolling_mean(log_views, i, w);
        const double day_phase =
            two_pi * static_cast<double>(((series.days[i] % 7) + 7) % 7) / 7.0;
        features(r, 0) = log_views[i];
        features(r, 1) = mean;
        features(r, 2) = rolling_std(log_views, i, w);
        features(r, 3) = log_views[i] - log_views[i - w];
        features(r, 4) = std::sin(day_phase);
        features(r, 5) = std::cos(day_phase);
        labels[r] = log_views[i + 1] > mean ? 1 : 0;
    }
    if (!features.all_finite())
        throw std::runtime_error("csv: pageviews recipe produced non-finite features");

    auto batches = chunk_rows(features, labels, config.batch_size);
    if (batches.empty())
        throw std::runtime_error("csv: too few rows to fill one batch of size " +
                                 std::to_string(config.batch_size));
    return std::make_unique<VectorStream>(std::move(batches), 6);
}

std::unique_ptr<DriftStream> build_raw_stream(const CsvStreamConfig& config,
                                              const CsvTable& table) {
    if (config.target_column.empty())
        throw std::runtime_error("csv: raw recipe requires target_column");
    const std::size_t target_col = table.column_index(config.target_column);

    std::vector<std::size_t> feature_cols;
    for (std::size_t c = 0; c < table.header.size(); ++c)
        if (c != target_col && table.header[c] != "date") feature_cols.push_back(c);
    if (feature_cols.empty()) throw std::runtime_error("csv: raw recipe found no feature columns");

    const std::size_t n = table.rows.size();
    Matrix features(n, feature_cols.size());
    std::vector<int> labels(n);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t j = 0; j < feature_cols.size(); ++j)
            features(r, j) = parse_numeric_cell(table, r, feature_cols[j]);
        const double y = parse_numeric_cell(table, r, target_col);
        if (y != 0.0 && y != 1.0)
            throw std::runtime_error("csv: raw target must be 0 or 1 at row " +
                                     std::to_string(r + 2));
        labels[r] = static_cast<int>(y);
    }
    if (!features.all_finite()) throw std::runtime_error("csv: non-finite feature values");

    auto batches = chunk_rows(features, labels, config.batch_size);
    if (batches.empty())
        throw std::runtime_error("csv: too few rows to fill one batch of size " +
                                 std::to_string(config.batch_size));
    const std::size_t dim = feature_cols.size();
    return std::make_unique<VectorStream>(std::move(batches), dim);
}

}  // namespace

void SyntheticDriftConfig::validate() const {
    if (steps == 0) throw std::invalid_argument("synthetic.steps must be positive");
    if (batch_size == 0) throw std::invalid_argument("synthetic.batch_size must be positive");
    if (!(initial_std > 0.0)) throw std::invalid_argument("synthetic.initial_std must be positive");
    if (!(label_sharpness > 0.0))
        throw std::invalid_argument("synthetic.label_sharpness must be positive");
    for (std::size_t t = 0; t <= steps; ++t) {
        const double sigma = initial_std + static_cast<double>(t) * variance_growth;
        if (!(sigma > 0.0))
            throw std::invalid_argument("synthetic.variance_growth drives sigma nonpositive at step " +
                                        std::to_string(t));
    }
}

std::unique_ptr<DriftStream> synthetic_stream(const SyntheticDriftConfig& config) {
    config.validate();
    return std::make_unique<SyntheticStream>(config);
}

double synthetic_label_probability(const SyntheticDriftConfig& config, std::size_t step,
                                   std::span<const double> x) {
    const double t = static_cast<double>(step);
    const double mu0 = config.initial_mean[0] + t * config.mean_velocity[0];
    const double mu1 = config.initial_mean[1] + t * config.mean_velocity[1];
    const double theta = t * config.boundary_rotation;
    return sigmoid(config.label_sharpness *
                   (std::cos(theta) * (x[0] - mu0) + std::sin(theta) * (x[1] - mu1)));
}

std::unique_ptr<DriftStream> csv_stream(const CsvStreamConfig& config) {
    if (config.batch_size == 0) throw std::invalid_argument("csv.batch_size must be positive");
    if (config.rolling_window == 0)
        throw std::invalid_argument("csv.rolling_window must be positive");
    const CsvTable table = read_csv(config.path);
    switch (config.recipe) {
        case FeatureRecipe::Finance: return build_finance_stream(config, table);
        case FeatureRecipe::PageViews: return build_pageviews_stream(config, table);
        case FeatureRecipe::Raw: return build_raw_stream(config, table);
    }
    throw std::invalid_argument("csv: unknown feature recipe");
}

namespace {

std::string iso_date_from_days(long days) {
    // inverse of days_from_civil (Hinnant's civil_from_days)
    long z = days + 719468;
    const long era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const long y = static_cast<long>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp < 10 ? mp + 3 : mp - 9;
    const long year = y + (m <= 2);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04ld-%02u-%02u", year, m, d);
    return buf;
}

}  // namespace

void write_toy_finance_csv(const std::filesystem::path& path) {
    const long start = days_from_civil({2020, 1, 1});
    Rng rng(std::uint64_t{20200101});
    CsvWriter out(path);
    out.write_row({"date", "close"});
    double close = 100.0;
    for (int i = 0; i < 160; ++i) {
        out.write_row({iso_date_from_days(start + i), format_double(close)});
        const double ret = 0.001 * std::sin(static_cast<double>(i) / 9.0) + 0.012 * rng.normal();
        close *= 1.0 + ret;
    }
}

void write_toy_pageviews_csv(const std::filesystem::path& path) {
    const long start = days_from_civil({2021, 3, 1});
    Rng rng(std::uint64_t{20210301});
    CsvWriter out(path);
    out.write_row({"date", "views"});
    for (int i = 0; i < 160; ++i) {
        const double weekly = 2000.0 * std::sin(2.0 * 3.14159265358979323846 * i / 7.0);
        double views = 5000.0 + weekly + 25.0 * i + 400.0 * rng.normal();
        long count = std::lround(std::max(views, 0.0));
        if (i == 45) count = 0;  // exercises the log1p(0) path downstream
        out.write_row({iso_date_from_days(start + i), std::to_string(count)});
    }
}

}  // namespace driftwatch
