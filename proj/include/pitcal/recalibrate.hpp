#pragma once

#include <memory>
#include <vector>

#include "pitcal/distributions.hpp"
#include "pitcal/pit_model.hpp"

namespace pitcal {

/// Base model at a fixed x composed with a fitted map:
/// Frecal(y) = Ghat(Fbase(y) | x). CDF, PDF, quantiles and the induced
/// transport map all come from this one composition, so quantiles cannot
/// cross and the CDF is monotone whenever the map is.
class RecalibratedDistribution final : public ScalarDistribution {
public:
    RecalibratedDistribution(std::shared_ptr<const ScalarDistribution> base,
                             std::shared_ptr<const PitModel> model, std::vector<double> x);

    double cdf(double y) const override;

    /// Chain rule g(Fbase(y)) * fbase(y) when the map has a density;
    /// otherwise a centered finite difference of the map with step 1e-4,
    /// floored at zero.
    double pdf(double y) const override;

    /// Bisection on a bracket grown outward from the base quantiles until
    /// |Frecal(y) - tau| < 1e-8.
    double quantile(double tau) const override;

    /// E[Y] as the Riemann-Stieltjes sum of the base quantile function
    /// against the map, int_0^1 Qbase(p) dGhat(p); refined once as a
    /// convergence check.
    double mean() const override;

    std::unique_ptr<ScalarDistribution> clone() const override;

    const ScalarDistribution& base() const { return *base_; }
    const PitCurve& map() const { return *curve_; }
    bool map_degenerate() const { return curve_->used_identity_fallback(); }

private:
    std::shared_ptr<const ScalarDistribution> base_;
    std::shared_ptr<const PitModel> model_;
    std::vector<double> x_;
    std::unique_ptr<PitCurve> curve_;
};

/// Transport map in outcome space, T(y) = Frecal^{-1}(Fbase(y)). Pushes the
/// base law forward onto the recalibrated law; the identity when the map is.
double ot_map(const RecalibratedDistribution& rd, double y);

/// Both sides of the threshold-probability identity at threshold t:
/// |Frecal(t) - Ftrue(t)| computed in outcome space, and |Ghat(p) - G(p)| at
/// p = Fbase(t) in probability space. With a correct composition the two
/// agree to roundoff.
struct ThresholdProbError {
    double reshaped_error; // |Frecal(t) - Ftrue(t)|
    double map_error;      // |Ghat(p) - G(p)|
};
ThresholdProbError threshold_prob_error(const RecalibratedDistribution& rd,
                                        const ScalarDistribution& truth,
                                        const PitCurve& true_map, double t);

} // namespace pitcal
