#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pitcal/distributions.hpp"
#include "pitcal/matrix.hpp"
#include "pitcal/parallel.hpp"
#include "pitcal/scoring.hpp"
#include "pitcal/train_config.hpp"

namespace pitcal {

constexpr std::size_t kTcTimesteps = 3;  // t-12, t-6, t
constexpr std::size_t kTcPredictors = 14; // 13 environmental columns + intensity
constexpr double kTcSentinel = 9999.0;

/// Predictor column names in file order; the last one is intensity_kt.
const std::vector<std::string>& tc_predictor_columns();

/// One 12-hour input sequence with its 24-hour-ahead target error.
struct StormSequence {
    std::string storm_id;
    int date = 0; // yyyymmdd of the reference time t
    int hour = 0;
    int year = 0;
    Matrix predictors; // kTcTimesteps x kTcPredictors, imputed, row = timestep
    /// Intensity at {t-24, t-12, t-6, t}; slot 0 is NaN when the storm has no
    /// record 24 h before the reference time.
    std::array<double, 4> intensity_history{};
    double target_error = 0.0; // knots

    double intensity_at_t() const { return intensity_history[3]; }
    /// Realized 24-hour intensity change, when the t-24 record exists.
    std::optional<double> change_24h() const;
};

enum class CategoryTag { TS, Cat1_2, Cat3_5, RI, RW };
std::string to_string(CategoryTag tag);

/// TS / Cat1-2 / Cat3-5 from the intensity at t (<=63 / 64..95 / >95 kt);
/// RI / RW from the realized 24-hour change (>= +30 / <= -30 kt). RI and RW
/// overlap the intensity categories.
std::vector<CategoryTag> categorize(const StormSequence& seq);

struct TcSchema {
    std::vector<std::string> predictor_columns; // size kTcPredictors
    static TcSchema standard();
};

struct IngestReport {
    std::vector<StormSequence> sequences;
    std::size_t dropped_all_null = 0;      // a predictor null at every timestep
    std::size_t dropped_missing_target = 0;
    std::vector<std::string> malformed; // "line N: reason"
};

/// Reads the sequence CSV (one row per (storm, t, timestep)), applies the
/// null rules (sentinel 9999): sequences with a predictor null at all of
/// t-12, t-6, t, or with a missing target, are dropped; partial nulls are
/// forward-filled from the previous timestep (leading nulls backfilled from
/// the first finite one). Malformed rows are collected with line numbers;
/// only an unreadable file is fatal.
IngestReport ingest_sequences(const std::filesystem::path& path,
                              const TcSchema& schema = TcSchema::standard());

/// The x-independent Gaussian base error model N(mean, sd^2).
ConstantFamily base_error_model(double mean_kt, double sd_kt);

/// Synthetic stand-in generator: smooth AR(1) predictor paths per storm,
/// an intensity path with intensification/weakening regimes, and target
/// errors whose bias and dispersion depend on the covariates so a constant
/// Gaussian base is genuinely miscalibrated. Sprinkles 9999 sentinels.
struct TcGenConfig {
    std::size_t storms = 60;
    int year_lo = 2000;
    int year_hi = 2022;
    std::uint64_t seed = 0;
    double missing_rate = 0.004;       // per predictor cell
    double all_null_rate = 0.0015;     // per (sequence, predictor): all 3 null
    double target_missing_rate = 0.002;
};

std::string generate_tc_csv(const TcGenConfig& config);
void write_tc_csv(const std::filesystem::path& path, const TcGenConfig& config);

struct TcEvalConfig {
    int calib_year_lo = 2000;
    int calib_year_hi = 2015;
    int test_year_lo = 2016;
    int test_year_hi = 2022;
    std::vector<std::string> methods = {"parametric", "nonparametric"};
    double base_mean = 0.0;
    std::optional<double> base_sd; // default: SD of calibration-era errors
    TrainConfig parametric_config; // temporal mixer is added internally
    std::optional<TrainConfig> nonparametric_config;
    std::uint64_t seed = 0;
    std::size_t crps_grid = 1024;

    void validate() const;
};

struct TcEvalResult {
    /// Rows {Overall, TS, Cat1-2, Cat3-5, RI, RW} x {base, methods} x
    /// {crps, rmse}; CRPS values are scaled x100 as in the emitted table.
    std::vector<ScoreRow> rows;
    std::size_t calib_count = 0;
    std::size_t test_count = 0;
    double base_sd = 0.0;
    std::map<std::string, std::size_t> test_category_counts;

    const ScoreRow* find(const std::string& category, const std::string& method,
                         const std::string& metric) const;
};

/// End-to-end evaluation: era split, base model, PIT, map fits on the
/// calibration era, per-category CRPS/RMSE on the test era with percent
/// change vs the base.
TcEvalResult evaluate_table(const std::vector<StormSequence>& data, const TcEvalConfig& config,
                            Exec exec = Exec::parallel);

} // namespace pitcal
