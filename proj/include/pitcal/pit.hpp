#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "pitcal/distributions.hpp"
#include "pitcal/matrix.hpp"
#include "pitcal/parallel.hpp"
#include "pitcal/pit_model.hpp"

namespace pitcal {

/// Calibration pairs (x_i, y_i): an n x d feature matrix and n scalar
/// responses. Validated on construction: n >= 1, consistent width, all
/// entries finite.
struct CalibrationSet {
    Matrix features;
    std::vector<double> responses;

    CalibrationSet(Matrix f, std::vector<double> r);

    std::size_t size() const { return responses.size(); }
    std::size_t dim() const { return features.cols(); }
    std::span<const double> x(std::size_t i) const { return features.row(i); }
    double y(std::size_t i) const { return responses[i]; }
};

/// Probability integral transform values, one per calibration pair.
struct PitSample {
    std::vector<double> z;
};

/// z_i = Fhat(y_i | x_i). A non-finite or out-of-range CDF value aborts with
/// the offending row index in the message.
PitSample compute_pit(const ConditionalFamily& base, const CalibrationSet& calib);

/// One probability-probability diagnostic: Ghat(alpha|x) over a sorted alpha
/// grid at a fixed x.
struct DiagnosticCurve {
    std::vector<double> alphas;
    std::vector<double> values;
    std::vector<double> x;
};

constexpr std::size_t kDefaultDiagnosticGrid = 101;

DiagnosticCurve diagnostic_curve(const PitModel& model, std::span<const double> x,
                                 std::size_t grid_size = kDefaultDiagnosticGrid);

/// Local discrepancy score: mean over the grid of (Ghat(alpha|x) - alpha)^2.
double lds(const DiagnosticCurve& curve);

/// Advisory failure-mode label from the signed areas between the curve and
/// the diagonal on [0,1/2] and [1/2,1]. One of "calibrated", "positive_bias",
/// "negative_bias", "overdispersion", "underdispersion". Never used in any
/// computation.
std::string curve_tag(const DiagnosticCurve& curve);

/// CSV with columns (alpha, g_hat).
void write_curve_csv(std::ostream& os, const DiagnosticCurve& curve);

/// LDS for every row of xs. OpenMP kernel; Exec::serial is the reference.
std::vector<double> lds_batch(const PitModel& model, const Matrix& xs,
                              std::size_t grid_size = kDefaultDiagnosticGrid,
                              Exec exec = Exec::parallel);

} // namespace pitcal
