#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pitcal/distributions.hpp"
#include "pitcal/parallel.hpp"
#include "pitcal/pit_model.hpp"

namespace pitcal {

enum class WeightKind { none, threshold, quantile };

struct ScoreConfig {
    /// Explicit grid bounds in outcome units; ignored when auto_bounds is
    /// set, in which case the grid spans
    /// [min(y, q(1e-4)) - margin, max(y, q(1-1e-4)) + margin] with a margin
    /// of one grid step.
    double lower = 0.0;
    double upper = 0.0;
    std::size_t grid_size = 1024;
    bool auto_bounds = true;
    WeightKind weight = WeightKind::none;
    /// u(t) for threshold weighting, v(alpha) for quantile weighting. A null
    /// handle means the constant weight 1, which reduces to the unweighted
    /// grid estimator exactly.
    std::function<double(double)> weight_fn;

    void validate() const;
};

/// Grid estimator of the continuous ranked probability score,
/// step * mean_j (F(t_j) - 1{y <= t_j})^2, optionally threshold- or
/// quantile-weighted. A y outside explicit bounds triggers one widened-grid
/// retry before erroring.
double crps(const ScalarDistribution& dist, double y, const ScoreConfig& cfg = {});

/// Pinball loss of the tau-quantile forecast: (q - y)(1{y <= q} - tau).
double pinball(const ScalarDistribution& dist, double y, double tau);

struct IseResult {
    double value = 0.0;
    std::size_t capped = 0; // grid points where the base density hit the floor
};

/// Integrated squared error between two maps at fixed x, transported to
/// outcome space: int_0^1 (ghat(p) - gtrue(p))^2 / fbase(Qbase(p)) dp by the
/// midpoint rule. Equals int (Frecal - Ftrue)^2 dy by change of variables.
IseResult ise_pit(const PitCurve& g_hat, const PitCurve& g_true, const ScalarDistribution& base,
                  std::size_t grid_size = 2048);

/// sqrt(mean_i (E[dist_i] - truth_i)^2) with means by quadrature.
double rmse_of_mean(std::span<const ScalarDistribution* const> dists,
                    std::span<const double> truths);

/// CRPS for each (dist, y) pair. OpenMP kernel; Exec::serial is the
/// reference implementation.
std::vector<double> crps_batch(std::span<const ScalarDistribution* const> dists,
                               std::span<const double> ys, const ScoreConfig& cfg = {},
                               Exec exec = Exec::parallel);

/// One row of an evaluation table.
struct ScoreRow {
    std::string category;
    std::string method;
    std::string metric;
    std::optional<double> value;          // missing when the cell is empty
    std::optional<double> pct_change_vs_base;
};

/// CSV with columns (category, method, metric, value, pct_change_vs_base);
/// missing cells are emitted as empty fields.
void write_score_csv(std::ostream& os, const std::vector<ScoreRow>& rows);

/// Signed percent change of value vs base, (value - base)/base * 100.
double percent_change(double base, double value);

} // namespace pitcal
