#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "pitcal/network.hpp"
#include "pitcal/pit.hpp"
#include "pitcal/pit_model.hpp"
#include "pitcal/train_config.hpp"

namespace pitcal {

/// Thrown when a fit cannot proceed (degenerate data, invalid shapes).
class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// x -> theta(x) = (a(x), b(x)): an optional temporal mixing stage followed
/// by a rectifier MLP with two raw outputs, mapped through
/// floor + softplus(.) so both family parameters stay positive.
struct ThetaNetwork {
    TemporalMixerSpec mixer; // disabled unless mixer.enabled()
    MlpSpec mlp;
    std::vector<double> params;
    double floor = 1e-3;

    std::size_t input_dim() const {
        return mixer.enabled() ? mixer.input_dim() : mlp.input_dim();
    }
    std::size_t param_count() const { return mixer.param_count() + mlp.param_count(); }

    /// Forward pass on an already standardized covariate vector.
    KumaraswamyParams theta(std::span<const double> x_std) const;
};

/// Fitted parametric map: Ghat(alpha|x) = Kumaraswamy CDF at theta(x).
class ParametricPitModel final : public PitModel {
public:
    ParametricPitModel(ThetaNetwork net, Standardizer standardizer, TrainConfig config);

    std::unique_ptr<PitCurve> curve(std::span<const double> x) const override;
    std::size_t input_dim() const override { return net_.input_dim(); }
    std::string kind() const override { return "parametric"; }
    nlohmann::json to_json() const override;
    static ParametricPitModel from_json(const nlohmann::json& j);

    /// theta at a raw (unstandardized) covariate vector.
    KumaraswamyParams theta(std::span<const double> x) const;

    const ThetaNetwork& network() const { return net_; }
    const Standardizer& standardizer() const { return standardizer_; }
    const TrainConfig& config() const { return config_; }

    /// Full-data training loss recorded at a few evenly spaced epochs
    /// (in-memory only, not serialized).
    const std::vector<std::pair<std::size_t, double>>& loss_checkpoints() const {
        return checkpoints_;
    }

private:
    friend ParametricPitModel fit_parametric(const CalibrationSet&, const PitSample&,
                                             const TrainConfig&);
    ThetaNetwork net_;
    Standardizer standardizer_;
    TrainConfig config_;
    std::vector<std::pair<std::size_t, double>> checkpoints_;
};

/// Maximum likelihood fit of the conditional Kumaraswamy PIT family by Adam
/// on the mean negative log-likelihood. Deterministic given (data, config).
ParametricPitModel fit_parametric(const CalibrationSet& calib, const PitSample& pit,
                                  const TrainConfig& config);

/// Mean Kumaraswamy NLL of the network on standardized features, and its
/// gradient w.r.t. the flat parameter vector. Exposed so the analytic
/// gradients can be verified against finite differences.
double parametric_nll(const ThetaNetwork& net, const Matrix& x_std, std::span<const double> z);
double parametric_nll_grad(const ThetaNetwork& net, const Matrix& x_std,
                           std::span<const double> z, std::span<double> grad);

} // namespace pitcal
