#pragma once

#include <span>
#include <vector>

#include <json.hpp>

#include "pitcal/network.hpp"
#include "pitcal/pit.hpp"
#include "pitcal/pit_model.hpp"
#include "pitcal/train_config.hpp"

namespace pitcal {

/// The alpha path of the monotone network: a bank of tanh units whose alpha
/// weights and output weights are stored unconstrained and mapped through
/// softplus (hence nonnegative), so the raw output is nondecreasing in alpha
/// by construction. Covariate information enters additively through an
/// embedding with unconstrained weights, sliding each unit's transition
/// location. Parameters live in an external flat span laid out as
/// [a1(w), V1(w x e), b1(w), a3(w), v3(e), b3].
class MonotonePathSpec {
public:
    MonotonePathSpec() = default;
    MonotonePathSpec(std::size_t width, std::size_t emb);

    std::size_t width() const { return width_; }
    std::size_t emb() const { return emb_; }
    std::size_t param_count() const { return count_; }

    /// softplus-mapped copies of the monotone weight blocks; refresh after
    /// every optimizer step.
    struct Cache {
        std::vector<double> a1, a3;
    };
    void refresh(std::span<const double> params, Cache& cache) const;

    /// Embedding-dependent terms shared across all alpha evaluations at one
    /// x: V1 e + b1 and v3.e + b3.
    struct Bound {
        std::vector<double> base1;
        double base_out = 0.0;
    };
    void bind(std::span<const double> params, std::span<const double> emb, Bound& bound) const;

    struct Tape {
        double alpha = 0.0;
        std::vector<double> u1;
        double out = 0.0;      // pre-squash
        double squashed = 0.0; // sigmoid(out)
    };

    /// Returns sigmoid(h(alpha | x)).
    double forward(const Cache& cache, const Bound& bound, double alpha, Tape& tape) const;

    /// d_squashed is dL/d sigmoid(out). Gradients for the softplus-mapped
    /// blocks are accumulated w.r.t. the *effective* (mapped) weights; call
    /// finalize_grad once per batch to convert them to raw-parameter space.
    /// demb receives += dL/d emb.
    void backward(std::span<const double> params, const Cache& cache, const Tape& tape,
                  std::span<const double> emb, double d_squashed, std::span<double> grad,
                  std::span<double> demb) const;

    void finalize_grad(std::span<const double> params, std::span<double> grad) const;

    void init(std::span<double> params, Rng& rng) const;

    /// Decayable entries: the unconstrained covariate weights V1 and v3.
    void weight_mask(std::vector<std::uint8_t>& mask, std::size_t offset) const;

private:
    std::size_t width_ = 0, emb_ = 0, count_ = 0;
    std::size_t off_a1_, off_v1_, off_b1_, off_a3_, off_v3_, off_b3_;
};

/// Monotone-in-alpha estimator of Ghat(alpha|x), trained by regressing the
/// indicator 1{z <= alpha} on (alpha, x) under the Brier score. Evaluation
/// normalizes the squashed output so Ghat(0|x) = 0 and Ghat(1|x) = 1 hold
/// exactly; a degenerate normalizer falls back to the identity map and
/// raises the curve's warning flag.
class MonotoneNet final : public PitModel {
public:
    MonotoneNet(MlpSpec cov, MonotonePathSpec path, std::vector<double> params,
                Standardizer standardizer, TrainConfig config);

    std::unique_ptr<PitCurve> curve(std::span<const double> x) const override;
    std::size_t input_dim() const override { return cov_.input_dim(); }
    std::string kind() const override { return "nonparametric"; }
    nlohmann::json to_json() const override;
    static MonotoneNet from_json(const nlohmann::json& j);

    const TrainConfig& config() const { return config_; }
    const Standardizer& standardizer() const { return standardizer_; }
    std::size_t width() const { return path_.width(); }

    const std::vector<std::pair<std::size_t, double>>& loss_checkpoints() const {
        return checkpoints_;
    }

private:
    friend MonotoneNet fit_nonparametric(const CalibrationSet&, const PitSample&,
                                         const TrainConfig&);
    MlpSpec cov_;
    MonotonePathSpec path_;
    std::vector<double> params_;
    MonotonePathSpec::Cache cache_; // softplus'd weights, fixed once fitted
    Standardizer standardizer_;
    TrainConfig config_;
    std::vector<std::pair<std::size_t, double>> checkpoints_;
};

/// Hidden width as a function of calibration size.
std::size_t monotone_width_schedule(std::size_t n);

/// Defaults tuned for the estimator: empty hidden sizes (width from the
/// schedule), a larger step, and an epoch budget that shrinks as N grows.
TrainConfig nonparametric_defaults(std::size_t n, std::uint64_t seed);

MonotoneNet fit_nonparametric(const CalibrationSet& calib, const PitSample& pit,
                              const TrainConfig& config);

/// Mean Brier score of any fitted map against the indicator 1{z_i <= alpha}
/// over a fixed evenly spaced alpha grid.
double pit_brier(const PitModel& model, const CalibrationSet& calib, const PitSample& pit,
                 std::size_t grid_size = 21);

} // namespace pitcal
