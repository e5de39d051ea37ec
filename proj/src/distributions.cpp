#include "pitcal/distributions.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "pitcal/special.hpp"

namespace pitcal {

namespace {

void require_finite(double v, const char* what) {
    if (!std::isfinite(v))
        throw std::domain_error(std::string(what) + ": non-finite input");
}

void require_prob_open(double u, const char* what) {
    if (!(u > 0.0 && u < 1.0))
        throw std::domain_error(std::string(what) + ": probability must lie in (0,1)");
}

constexpr double kPitClamp = 1e-12;

} // namespace

double ScalarDistribution::mean() const {
    auto integrate = [this](std::size_t n) {
        // Midpoint rule in probability space: E[Y] = int_0^1 Q(p) dp.
        const double lo = 1e-7, hi = 1.0 - 1e-7;
        double h = (hi - lo) / static_cast<double>(n);
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k)
            acc += quantile(lo + (static_cast<double>(k) + 0.5) * h);
        return acc * h;
    };
    double coarse = integrate(2048);
    double fine = integrate(4096);
    if (std::abs(fine - coarse) > 1e-4 * (1.0 + std::abs(fine)))
        throw std::runtime_error("ScalarDistribution::mean: quantile quadrature did not converge");
    return fine;
}

// ---------------------------------------------------------------------------
// Gaussian

GaussianDistribution::GaussianDistribution(GaussianParams p) : params_(p) {
    require_finite(p.mean, "GaussianDistribution mean");
    require_finite(p.sd, "GaussianDistribution sd");
    if (p.sd <= 0.0) throw std::domain_error("GaussianDistribution: sd must be positive");
}

double GaussianDistribution::cdf(double y) const {
    require_finite(y, "GaussianDistribution::cdf");
    return std_normal_cdf((y - params_.mean) / params_.sd);
}

double GaussianDistribution::pdf(double y) const {
    require_finite(y, "GaussianDistribution::pdf");
    return std_normal_pdf((y - params_.mean) / params_.sd) / params_.sd;
}

double GaussianDistribution::quantile(double u) const {
    require_prob_open(u, "GaussianDistribution::quantile");
    return params_.mean + params_.sd * std_normal_quantile(u);
}

std::unique_ptr<ScalarDistribution> GaussianDistribution::clone() const {
    return std::make_unique<GaussianDistribution>(*this);
}

// ---------------------------------------------------------------------------
// Sinh-arcsinh

SasDistribution::SasDistribution(SasParams p) : params_(p) {
    require_finite(p.mu, "SasDistribution mu");
    require_finite(p.sigma, "SasDistribution sigma");
    require_finite(p.eps, "SasDistribution eps");
    require_finite(p.delta, "SasDistribution delta");
    if (p.sigma <= 0.0) throw std::domain_error("SasDistribution: sigma must be positive");
    if (p.delta <= 0.0) throw std::domain_error("SasDistribution: delta must be positive");
}

double SasDistribution::cdf(double y) const {
    require_finite(y, "SasDistribution::cdf");
    double r = (y - params_.mu) / params_.sigma;
    double s = std::sinh(params_.delta * std::asinh(r) - params_.eps);
    return std_normal_cdf(s);
}

double SasDistribution::pdf(double y) const {
    require_finite(y, "SasDistribution::pdf");
    double r = (y - params_.mu) / params_.sigma;
    double w = params_.delta * std::asinh(r) - params_.eps;
    // d/dy Phi(sinh(w)) = phi(sinh(w)) * cosh(w) * delta / (sigma*sqrt(1+r^2))
    return std_normal_pdf(std::sinh(w)) * std::cosh(w) * params_.delta /
           (params_.sigma * std::sqrt(1.0 + r * r));
}

double SasDistribution::quantile(double u) const {
    require_prob_open(u, "SasDistribution::quantile");
    double s = std_normal_quantile(u);
    return params_.mu +
           params_.sigma * std::sinh((std::asinh(s) + params_.eps) / params_.delta);
}

std::unique_ptr<ScalarDistribution> SasDistribution::clone() const {
    return std::make_unique<SasDistribution>(*this);
}

// ---------------------------------------------------------------------------
// Kumaraswamy

KumaraswamyDistribution::KumaraswamyDistribution(KumaraswamyParams p) : params_(p) {
    require_finite(p.a, "KumaraswamyDistribution a");
    require_finite(p.b, "KumaraswamyDistribution b");
    if (p.a <= 0.0 || p.b <= 0.0)
        throw std::domain_error("KumaraswamyDistribution: a and b must be positive");
}

double KumaraswamyDistribution::cdf(double y) const {
    require_finite(y, "KumaraswamyDistribution::cdf");
    if (y < 0.0 || y > 1.0)
        throw std::domain_error("KumaraswamyDistribution::cdf: argument outside [0,1]");
    if (y == 0.0) return 0.0;
    if (y == 1.0) return 1.0;
    // 1 - (1 - y^a)^b, with the inner term via expm1 for precision near 1.
    double t = params_.a * std::log(y);
    return -std::expm1(params_.b * std::log(-std::expm1(t)));
}

double KumaraswamyDistribution::pdf(double y) const {
    require_finite(y, "KumaraswamyDistribution::pdf");
    if (y < 0.0 || y > 1.0)
        throw std::domain_error("KumaraswamyDistribution::pdf: argument outside [0,1]");
    if (y == 0.0 || y == 1.0) {
        double zc = y == 0.0 ? kPitClamp : 1.0 - kPitClamp;
        return std::exp(log_pdf(zc));
    }
    return std::exp(log_pdf(y));
}

double KumaraswamyDistribution::log_pdf(double z) const {
    double zc = std::min(std::max(z, kPitClamp), 1.0 - kPitClamp);
    double t = params_.a * std::log(zc);
    return std::log(params_.a) + std::log(params_.b) + (params_.a - 1.0) * std::log(zc) +
           (params_.b - 1.0) * std::log(-std::expm1(t));
}

double KumaraswamyDistribution::quantile(double u) const {
    if (!(u >= 0.0 && u <= 1.0))
        throw std::domain_error("KumaraswamyDistribution::quantile: u outside [0,1]");
    if (u == 0.0) return 0.0;
    if (u == 1.0) return 1.0;
    // (1 - (1-u)^(1/b))^(1/a)
    double inner = -std::expm1(std::log1p(-u) / params_.b);
    return std::exp(std::log(inner) / params_.a);
}

double KumaraswamyDistribution::mean() const {
    // b * B(1 + 1/a, b)
    double a = params_.a, b = params_.b;
    return std::exp(std::log(b) + std::lgamma(1.0 + 1.0 / a) + std::lgamma(b) -
                    std::lgamma(1.0 + 1.0 / a + b));
}

std::unique_ptr<ScalarDistribution> KumaraswamyDistribution::clone() const {
    return std::make_unique<KumaraswamyDistribution>(*this);
}

GaussianDistribution gaussian_dist(const GaussianParams& p) { return GaussianDistribution(p); }
SasDistribution sas_dist(const SasParams& p) { return SasDistribution(p); }
KumaraswamyDistribution kumaraswamy_dist(const KumaraswamyParams& p) {
    return KumaraswamyDistribution(p);
}

} // namespace pitcal
