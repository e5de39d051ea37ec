#include "pitcal/recalibrate.hpp"

#include <cmath>
#include <stdexcept>

namespace pitcal {

namespace {
constexpr double kFdStep = 1e-4;
constexpr double kQuantileTol = 1e-8;
constexpr int kMaxBracketGrowth = 60;
constexpr int kMaxBisection = 200;
} // namespace

RecalibratedDistribution::RecalibratedDistribution(std::shared_ptr<const ScalarDistribution> base,
                                                   std::shared_ptr<const PitModel> model,
                                                   std::vector<double> x)
    : base_(std::move(base)), model_(std::move(model)), x_(std::move(x)) {
    if (!base_ || !model_) throw std::invalid_argument("RecalibratedDistribution: null input");
    curve_ = model_->curve(x_);
}

double RecalibratedDistribution::cdf(double y) const {
    if (!std::isfinite(y)) throw std::domain_error("RecalibratedDistribution::cdf: non-finite y");
    return (*curve_)(base_->cdf(y));
}

double RecalibratedDistribution::pdf(double y) const {
    if (!std::isfinite(y)) throw std::domain_error("RecalibratedDistribution::pdf: non-finite y");
    double p = base_->cdf(y);
    double g;
    if (curve_->has_density()) {
        g = curve_->density(p);
    } else {
        double lo = std::max(p - kFdStep, 0.0);
        double hi = std::min(p + kFdStep, 1.0);
        g = ((*curve_)(hi) - (*curve_)(lo)) / (hi - lo);
    }
    return std::max(g, 0.0) * base_->pdf(y);
}

double RecalibratedDistribution::quantile(double tau) const {
    if (!(tau > 0.0 && tau < 1.0))
        throw std::domain_error("RecalibratedDistribution::quantile: tau must lie in (0,1)");
    double lo = base_->quantile(1e-6);
    double hi = base_->quantile(1.0 - 1e-6);
    double flo = cdf(lo), fhi = cdf(hi);
    double width = hi - lo;
    int growth = 0;
    while ((flo > tau || fhi < tau) && growth < kMaxBracketGrowth) {
        if (flo > tau) {
            lo -= width;
            flo = cdf(lo);
        }
        if (fhi < tau) {
            hi += width;
            fhi = cdf(hi);
        }
        width *= 2.0;
        ++growth;
    }
    if (flo > tau || fhi < tau)
        throw std::runtime_error(
            "RecalibratedDistribution::quantile: bracket expansion failed (pathological map)");
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < kMaxBisection; ++it) {
        mid = 0.5 * (lo + hi);
        double fmid = cdf(mid);
        // Converge in probability and in outcome space; the latter matters
        // where the density is small and a 1e-8 CDF tolerance alone would
        // leave y imprecise.
        if (std::abs(fmid - tau) < kQuantileTol && (hi - lo) < 1e-9 * (1.0 + std::abs(mid)))
            return mid;
        if (fmid < tau)
            lo = mid;
        else
            hi = mid;
    }
    if (std::abs(cdf(mid) - tau) > kQuantileTol)
        throw std::runtime_error(
            "RecalibratedDistribution::quantile: bisection stalled (pathological map, e.g. a "
            "tail jump beyond the base model's representable range)");
    return mid;
}

double RecalibratedDistribution::mean() const {
    // Riemann-Stieltjes sum of the base quantile against the map. The
    // partition is geometric near both endpoints: the map's density may be
    // singular there (Kumaraswamy with a < 1 or b < 1) and uniform cells
    // converge too slowly.
    auto partition = [](std::size_t n_tail, std::size_t n_mid, std::vector<double>& p) {
        const double plo = 1e-7, phi = 1.0 - 1e-7, edge = 0.01;
        p.clear();
        double ratio = std::pow(edge / plo, 1.0 / static_cast<double>(n_tail));
        double v = plo;
        for (std::size_t k = 0; k <= n_tail; ++k, v *= ratio) p.push_back(std::min(v, edge));
        double h = (1.0 - 2.0 * edge) / static_cast<double>(n_mid);
        for (std::size_t k = 1; k <= n_mid; ++k) p.push_back(edge + h * static_cast<double>(k));
        v = edge;
        for (std::size_t k = 1; k <= n_tail; ++k) {
            v /= ratio;
            p.push_back(1.0 - std::max(v, plo * 0.999));
        }
        p.back() = phi;
    };
    auto stieltjes = [this, &partition](std::size_t n_tail, std::size_t n_mid) {
        std::vector<double> p;
        partition(n_tail, n_mid, p);
        double g_prev = (*curve_)(p.front());
        // Tail mass outside the partition lumped at the boundary quantiles.
        double acc = base_->quantile(p.front()) * g_prev;
        for (std::size_t k = 1; k < p.size(); ++k) {
            double g_next = (*curve_)(p[k]);
            acc += base_->quantile(0.5 * (p[k - 1] + p[k])) * (g_next - g_prev);
            g_prev = g_next;
        }
        acc += base_->quantile(p.back()) * (1.0 - g_prev);
        return acc;
    };
    double coarse = stieltjes(192, 2048);
    double fine = stieltjes(384, 4096);
    double scale = std::max(1.0, base_->quantile(0.99) - base_->quantile(0.01));
    if (std::abs(fine - coarse) > 1e-3 * scale)
        throw std::runtime_error("RecalibratedDistribution::mean: quadrature did not converge");
    return fine;
}

std::unique_ptr<ScalarDistribution> RecalibratedDistribution::clone() const {
    return std::make_unique<RecalibratedDistribution>(base_, model_, x_);
}

double ot_map(const RecalibratedDistribution& rd, double y) {
    if (!std::isfinite(y)) throw std::domain_error("ot_map: non-finite y");
    double p = rd.base().cdf(y);
    p = std::min(std::max(p, 1e-15), 1.0 - 1e-15);
    return rd.quantile(p);
}

ThresholdProbError threshold_prob_error(const RecalibratedDistribution& rd,
                                        const ScalarDistribution& truth,
                                        const PitCurve& true_map, double t) {
    double p = rd.base().cdf(t);
    ThresholdProbError out;
    out.reshaped_error = std::abs(rd.cdf(t) - truth.cdf(t));
    out.map_error = std::abs(rd.map()(p) - true_map(p));
    return out;
}

} // namespace pitcal
