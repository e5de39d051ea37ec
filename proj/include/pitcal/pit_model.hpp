#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "pitcal/distributions.hpp"

namespace pitcal {

/// Ghat(.|x) bound to a fixed covariate vector. Binding is where models do
/// their per-x work (e.g. one network pass) so that repeated alpha
/// evaluations along a curve stay cheap.
class PitCurve {
public:
    virtual ~PitCurve() = default;

    /// Ghat(alpha|x); alpha must lie in [0,1].
    virtual double operator()(double alpha) const = 0;

    virtual bool has_density() const { return false; }
    /// dGhat/dalpha where available; throws std::logic_error otherwise.
    virtual double density(double alpha) const;

    /// True when a degenerate normalizer forced the identity fallback.
    virtual bool used_identity_fallback() const { return false; }
};

/// A fitted covariate-conditional map alpha -> Ghat(alpha|x).
class PitModel {
public:
    virtual ~PitModel() = default;

    /// Bind the map at x. The returned curve may reference model internals;
    /// keep the model alive while the curve is in use.
    virtual std::unique_ptr<PitCurve> curve(std::span<const double> x) const = 0;

    /// Expected covariate dimension; 0 means any.
    virtual std::size_t input_dim() const = 0;

    virtual std::string kind() const = 0;

    /// Serialization envelope; models that cannot be serialized throw.
    virtual nlohmann::json to_json() const;

    /// Convenience single evaluation. Prefer curve() in loops over alpha.
    double g(double alpha, std::span<const double> x) const { return (*curve(x))(alpha); }
};

/// The perfectly calibrated map Ghat(alpha|x) = alpha.
class IdentityPitModel final : public PitModel {
public:
    std::unique_ptr<PitCurve> curve(std::span<const double> x) const override;
    std::size_t input_dim() const override { return 0; }
    std::string kind() const override { return "identity"; }
};

/// Fixed Kumaraswamy CDF as the map, independent of x. Used for closed-form
/// fixtures and as a building block of synthetic constructions.
class KumaraswamyPitModel final : public PitModel {
public:
    explicit KumaraswamyPitModel(KumaraswamyParams p) : dist_(p) {}

    std::unique_ptr<PitCurve> curve(std::span<const double> x) const override;
    std::size_t input_dim() const override { return 0; }
    std::string kind() const override { return "kumaraswamy_fixed"; }

private:
    KumaraswamyDistribution dist_;
};

/// Wraps arbitrary callables as a map; handy for analytic oracles. Not
/// serializable.
class FunctionPitModel final : public PitModel {
public:
    using MapFn = std::function<double(double alpha, std::span<const double> x)>;
    using DensityFn = std::function<double(double alpha, std::span<const double> x)>;

    explicit FunctionPitModel(MapFn map, DensityFn density = nullptr, std::size_t dim = 0)
        : map_(std::move(map)), density_(std::move(density)), dim_(dim) {}

    std::unique_ptr<PitCurve> curve(std::span<const double> x) const override;
    std::size_t input_dim() const override { return dim_; }
    std::string kind() const override { return "function"; }

private:
    MapFn map_;
    DensityFn density_;
    std::size_t dim_;
};

} // namespace pitcal
