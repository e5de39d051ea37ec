#include "pitcal/pit.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "pitcal/csv.hpp"

namespace pitcal {

CalibrationSet::CalibrationSet(Matrix f, std::vector<double> r)
    : features(std::move(f)), responses(std::move(r)) {
    if (responses.empty()) throw std::invalid_argument("CalibrationSet: empty");
    if (features.rows() != responses.size())
        throw std::invalid_argument("CalibrationSet: feature rows != response count");
    for (std::size_t i = 0; i < features.rows(); ++i) {
        for (std::size_t j = 0; j < features.cols(); ++j)
            if (!std::isfinite(features(i, j)))
                throw std::invalid_argument("CalibrationSet: non-finite feature at row " +
                                            std::to_string(i));
        if (!std::isfinite(responses[i]))
            throw std::invalid_argument("CalibrationSet: non-finite response at row " +
                                        std::to_string(i));
    }
}

PitSample compute_pit(const ConditionalFamily& base, const CalibrationSet& calib) {
    PitSample out;
    out.z.resize(calib.size());
    for (std::size_t i = 0; i < calib.size(); ++i) {
        double z;
        try {
            z = base.at(calib.x(i))->cdf(calib.y(i));
        } catch (const std::exception& e) {
            throw std::runtime_error("compute_pit: base evaluation failed at row " +
                                     std::to_string(i) + ": " + e.what());
        }
        if (!std::isfinite(z) || z < 0.0 || z > 1.0)
            throw std::runtime_error("compute_pit: base CDF out of range at row " +
                                     std::to_string(i));
        out.z[i] = z;
    }
    return out;
}

DiagnosticCurve diagnostic_curve(const PitModel& model, std::span<const double> x,
                                 std::size_t grid_size) {
    if (grid_size < 2) throw std::invalid_argument("diagnostic_curve: grid_size must be >= 2");
    if (model.input_dim() != 0 && model.input_dim() != x.size())
        throw std::invalid_argument("diagnostic_curve: covariate dimension mismatch");
    DiagnosticCurve curve;
    curve.x.assign(x.begin(), x.end());
    curve.alphas.resize(grid_size);
    curve.values.resize(grid_size);
    auto g = model.curve(x);
    for (std::size_t k = 0; k < grid_size; ++k) {
        double alpha = static_cast<double>(k) / static_cast<double>(grid_size - 1);
        curve.alphas[k] = alpha;
        curve.values[k] = (*g)(alpha);
    }
    return curve;
}

double lds(const DiagnosticCurve& curve) {
    if (curve.alphas.empty()) throw std::invalid_argument("lds: empty grid");
    double acc = 0.0;
    for (std::size_t k = 0; k < curve.alphas.size(); ++k) {
        double d = curve.values[k] - curve.alphas[k];
        acc += d * d;
    }
    return acc / static_cast<double>(curve.alphas.size());
}

std::string curve_tag(const DiagnosticCurve& curve) {
    // Signed mean deviation from the diagonal on each half of [0,1].
    double lower = 0.0, upper = 0.0;
    std::size_t nl = 0, nu = 0;
    for (std::size_t k = 0; k < curve.alphas.size(); ++k) {
        double d = curve.values[k] - curve.alphas[k];
        if (curve.alphas[k] <= 0.5) {
            lower += d;
            ++nl;
        }
        if (curve.alphas[k] >= 0.5) {
            upper += d;
            ++nu;
        }
    }
    if (nl) lower /= static_cast<double>(nl);
    if (nu) upper /= static_cast<double>(nu);
    const double tol = 0.01;
    bool lo_flat = std::abs(lower) < tol, up_flat = std::abs(upper) < tol;
    if (lo_flat && up_flat) return "calibrated";
    if (lower >= 0.0 && upper >= 0.0) return "positive_bias";
    if (lower <= 0.0 && upper <= 0.0) return "negative_bias";
    if (lower < 0.0 && upper > 0.0) return "overdispersion";
    return "underdispersion";
}

void write_curve_csv(std::ostream& os, const DiagnosticCurve& curve) {
    os << "alpha,g_hat\n";
    for (std::size_t k = 0; k < curve.alphas.size(); ++k)
        os << csv::number(curve.alphas[k]) << ',' << csv::number(curve.values[k]) << '\n';
}

std::vector<double> lds_batch(const PitModel& model, const Matrix& xs, std::size_t grid_size,
                              Exec exec) {
    std::vector<double> out(xs.rows());
    for_each_index(xs.rows(), exec, [&](std::size_t i) {
        out[i] = lds(diagnostic_curve(model, xs.row(i), grid_size));
    });
    return out;
}

} // namespace pitcal
