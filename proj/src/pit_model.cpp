#include "pitcal/pit_model.hpp"

#include <stdexcept>

namespace pitcal {

double PitCurve::density(double) const {
    throw std::logic_error("PitCurve::density: model has no density");
}

nlohmann::json PitModel::to_json() const {
    throw std::logic_error("PitModel::to_json: model kind '" + kind() + "' is not serializable");
}

namespace {

void check_alpha(double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::domain_error("PitCurve: alpha outside [0,1]");
}

class IdentityCurve final : public PitCurve {
public:
    double operator()(double alpha) const override {
        check_alpha(alpha);
        return alpha;
    }
    bool has_density() const override { return true; }
    double density(double alpha) const override {
        check_alpha(alpha);
        return 1.0;
    }
};

class KumaraswamyCurve final : public PitCurve {
public:
    explicit KumaraswamyCurve(const KumaraswamyDistribution& d) : dist_(d) {}
    double operator()(double alpha) const override {
        check_alpha(alpha);
        return dist_.cdf(alpha);
    }
    bool has_density() const override { return true; }
    double density(double alpha) const override {
        check_alpha(alpha);
        return dist_.pdf(alpha);
    }

private:
    KumaraswamyDistribution dist_;
};

class FunctionCurve final : public PitCurve {
public:
    FunctionCurve(const FunctionPitModel::MapFn& map, const FunctionPitModel::DensityFn& density,
                  std::span<const double> x)
        : map_(map), density_(density), x_(x.begin(), x.end()) {}

    double operator()(double alpha) const override {
        check_alpha(alpha);
        return map_(alpha, x_);
    }
    bool has_density() const override { return static_cast<bool>(density_); }
    double density(double alpha) const override {
        check_alpha(alpha);
        if (!density_) return PitCurve::density(alpha);
        return density_(alpha, x_);
    }

private:
    const FunctionPitModel::MapFn& map_;
    const FunctionPitModel::DensityFn& density_;
    std::vector<double> x_;
};

} // namespace

std::unique_ptr<PitCurve> IdentityPitModel::curve(std::span<const double>) const {
    return std::make_unique<IdentityCurve>();
}

std::unique_ptr<PitCurve> KumaraswamyPitModel::curve(std::span<const double>) const {
    return std::make_unique<KumaraswamyCurve>(dist_);
}

std::unique_ptr<PitCurve> FunctionPitModel::curve(std::span<const double> x) const {
    if (dim_ != 0 && x.size() != dim_)
        throw std::invalid_argument("FunctionPitModel: covariate dimension mismatch");
    return std::make_unique<FunctionCurve>(map_, density_, x);
}

} // namespace pitcal
