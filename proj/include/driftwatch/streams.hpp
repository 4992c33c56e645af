#pragma once

// Nonstationary data sources: a synthetic 2-D Gaussian drift generator and a
// CSV ingestion pipeline with finance / pageviews feature recipes.

#include <array>
#include <filesystem>
#include <memory>
#include <string>

#include "driftwatch/core.hpp"

namespace driftwatch {

struct SyntheticDriftConfig {
    std::size_t steps = 200;
    std::size_t batch_size = 100;
    std::array<double, 2> initial_mean{0.0, 0.0};
    double initial_std = 1.0;
    std::array<double, 2> mean_velocity{0.02, 0.01};  // per step
    double variance_growth = 0.005;                   // added to sigma per step
    double boundary_rotation = 0.007853981633974483;  // pi/400 radians per step
    double label_sharpness = 2.0;
    RngSeed seed{42};

    void validate() const;  // sigma_t must stay positive through step `steps`
};

// At step t: features ~ N(mu_t, sigma_t^2 I) with mu_t = initial_mean +
// t * mean_velocity and sigma_t = initial_std + t * variance_growth; labels
// are drawn from the rotating logistic boundary probability below.
std::unique_ptr<DriftStream> synthetic_stream(const SyntheticDriftConfig& config);

// P(y = 1 | x) at a given step: sigma(label_sharpness * (cos th, sin th) .
// (x - mu_t)) with th = t * boundary_rotation. Exposed so label geometry is
// testable without sampling.
double synthetic_label_probability(const SyntheticDriftConfig& config, std::size_t step,
                                   std::span<const double> x);

enum class FeatureRecipe { Finance, PageViews, Raw };

struct CsvStreamConfig {
    std::filesystem::path path;
    // Column the target is derived from. Defaults per recipe: "close" for
    // Finance, "views" for PageViews. Required for Raw, where it must hold
    // 0/1 labels directly.
    std::string target_column;
    FeatureRecipe recipe = FeatureRecipe::Finance;
    std::size_t rolling_window = 20;
    std::size_t batch_size = 5;
};

// Reads the file eagerly, engineers features per the recipe, drops warmup
// rows with incomplete windows, and chunks the remainder into batches
// (final partial batch dropped).
//
// Finance (schema date,close): 1-step return, rolling volatility of returns,
// 14-period Wilder RSI, momentum over rolling_window; target = next-day
// return sign.
// PageViews (schema date,views): log1p volume, rolling mean/std of log
// volume, momentum over rolling_window, weekly (sin, cos) seasonality;
// target = next-day log volume above the current rolling mean.
std::unique_ptr<DriftStream> csv_stream(const CsvStreamConfig& config);

// Deterministic toy CSVs matching the documented schemas, used for smoke
// tests and by the gen-fixtures CLI subcommand.
void write_toy_finance_csv(const std::filesystem::path& path);
void write_toy_pageviews_csv(const std::filesystem::path& path);

}  // namespace driftwatch
