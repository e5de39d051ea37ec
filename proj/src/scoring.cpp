#include "pitcal/scoring.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "pitcal/csv.hpp"

namespace pitcal {

void ScoreConfig::validate() const {
    if (grid_size < 8) throw std::invalid_argument("ScoreConfig: grid_size must be >= 8");
    if (!auto_bounds && !(lower < upper))
        throw std::invalid_argument("ScoreConfig: lower must be below upper");
}

namespace {

// Riemann sum step * sum_j w(t_j) (F(t_j) - 1{y<=t_j})^2 over the grid.
double crps_grid_sum(const ScalarDistribution& dist, double y, double lo, double hi,
                     std::size_t m, const std::function<double(double)>& u) {
    double step = (hi - lo) / static_cast<double>(m - 1);
    double acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        double t = lo + static_cast<double>(j) * step;
        double d = dist.cdf(t) - (y <= t ? 1.0 : 0.0);
        double w = u ? u(t) : 1.0;
        acc += w * d * d;
    }
    return step * acc;
}

double crps_quantile_weighted(const ScalarDistribution& dist, double y, std::size_t m,
                              const std::function<double(double)>& v) {
    // 2 int_0^1 pinball_alpha * v(alpha) d alpha, midpoint rule.
    double acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        double alpha = (static_cast<double>(j) + 0.5) / static_cast<double>(m);
        acc += 2.0 * pinball(dist, y, alpha) * v(alpha);
    }
    return acc / static_cast<double>(m);
}

} // namespace

double crps(const ScalarDistribution& dist, double y, const ScoreConfig& cfg) {
    cfg.validate();
    if (!std::isfinite(y)) throw std::domain_error("crps: non-finite observation");
    if (cfg.weight == WeightKind::quantile && cfg.weight_fn)
        return crps_quantile_weighted(dist, y, cfg.grid_size, cfg.weight_fn);

    const std::function<double(double)>& u =
        (cfg.weight == WeightKind::threshold) ? cfg.weight_fn : nullptr;
    double lo, hi;
    if (cfg.auto_bounds) {
        lo = std::min(y, dist.quantile(1e-4));
        hi = std::max(y, dist.quantile(1.0 - 1e-4));
        double step = (hi - lo) / static_cast<double>(cfg.grid_size - 1);
        lo -= step;
        hi += step;
    } else {
        lo = cfg.lower;
        hi = cfg.upper;
        if (y < lo || y > hi) {
            // One widened retry so the indicator jump is inside the grid.
            double step = (hi - lo) / static_cast<double>(cfg.grid_size - 1);
            lo = std::min(lo, y - step);
            hi = std::max(hi, y + step);
            if (y < lo || y > hi) throw std::runtime_error("crps: observation outside grid");
        }
    }
    return crps_grid_sum(dist, y, lo, hi, cfg.grid_size, u);
}

double pinball(const ScalarDistribution& dist, double y, double tau) {
    if (!(tau > 0.0 && tau < 1.0)) throw std::domain_error("pinball: tau must lie in (0,1)");
    double q = dist.quantile(tau);
    return (q - y) * ((y <= q ? 1.0 : 0.0) - tau);
}

IseResult ise_pit(const PitCurve& g_hat, const PitCurve& g_true, const ScalarDistribution& base,
                  std::size_t grid_size) {
    constexpr double kDensityFloor = 1e-15;
    IseResult out;
    double acc = 0.0;
    for (std::size_t k = 0; k < grid_size; ++k) {
        double p = (static_cast<double>(k) + 0.5) / static_cast<double>(grid_size);
        double diff = g_hat(p) - g_true(p);
        double f = base.pdf(base.quantile(p));
        if (f < kDensityFloor) {
            f = kDensityFloor;
            ++out.capped;
        }
        acc += diff * diff / f;
    }
    out.value = acc / static_cast<double>(grid_size);
    return out;
}

double rmse_of_mean(std::span<const ScalarDistribution* const> dists,
                    std::span<const double> truths) {
    if (dists.size() != truths.size())
        throw std::invalid_argument("rmse_of_mean: length mismatch");
    if (dists.empty()) throw std::invalid_argument("rmse_of_mean: empty input");
    double acc = 0.0;
    for (std::size_t i = 0; i < dists.size(); ++i) {
        double d = dists[i]->mean() - truths[i];
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(dists.size()));
}

std::vector<double> crps_batch(std::span<const ScalarDistribution* const> dists,
                               std::span<const double> ys, const ScoreConfig& cfg, Exec exec) {
    if (dists.size() != ys.size()) throw std::invalid_argument("crps_batch: length mismatch");
    std::vector<double> out(dists.size());
    for_each_index(dists.size(), exec,
                   [&](std::size_t i) { out[i] = crps(*dists[i], ys[i], cfg); });
    return out;
}

void write_score_csv(std::ostream& os, const std::vector<ScoreRow>& rows) {
    os << "category,method,metric,value,pct_change_vs_base\n";
    for (const auto& r : rows) {
        os << r.category << ',' << r.method << ',' << r.metric << ',';
        if (r.value) os << csv::number(*r.value);
        os << ',';
        if (r.pct_change_vs_base) os << csv::number(*r.pct_change_vs_base);
        os << '\n';
    }
}

double percent_change(double base, double value) { return (value - base) / base * 100.0; }

} // namespace pitcal
