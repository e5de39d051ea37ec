#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pitcal/matrix.hpp"
#include "pitcal/rng.hpp"

namespace pitcal {

enum class Activation { relu, tanh_act, identity };

double activate(Activation a, double x);
/// Derivative expressed through the activated value.
double activate_grad(Activation a, double activated);

/// Per-dimension zero-mean/unit-scale transform. Constant columns keep
/// scale 1 so they pass through unchanged.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> scale;

    static Standardizer fit(const Matrix& features);
    static Standardizer identity(std::size_t dim);

    std::size_t dim() const { return mean.size(); }
    void apply(std::span<const double> in, std::span<double> out) const;
    std::vector<double> apply(std::span<const double> in) const;
};

/// Fully connected feed-forward architecture with linear output layer. The
/// spec holds no parameters itself; forward/backward operate on an external
/// flat parameter span laid out as [W0, b0, W1, b1, ...] with W row-major
/// (out x in). Keeping storage external lets composite networks expose one
/// contiguous vector to the optimizer and to finite-difference checks.
class MlpSpec {
public:
    MlpSpec() = default;
    MlpSpec(std::vector<std::size_t> dims, Activation hidden);

    std::size_t param_count() const { return param_count_; }
    std::size_t input_dim() const { return dims_.front(); }
    std::size_t output_dim() const { return dims_.back(); }
    const std::vector<std::size_t>& dims() const { return dims_; }
    Activation hidden_activation() const { return hidden_; }

    struct Tape {
        // act[0] is the input copy; act[l] the output of layer l.
        std::vector<std::vector<double>> act;
        std::vector<double> delta_hi, delta_lo; // scratch for backward
    };
    Tape make_tape() const;

    void forward(std::span<const double> params, std::span<const double> in, Tape& tape) const;
    std::span<const double> output(const Tape& tape) const { return tape.act.back(); }

    /// Accumulates dL/dparams into grad (+=). If dinput is non-empty it
    /// receives dL/dinput (overwritten).
    void backward(std::span<const double> params, Tape& tape, std::span<const double> dout,
                  std::span<double> grad, std::span<double> dinput) const;

    /// He/Glorot uniform weight init (choice depends on the activation),
    /// zero biases.
    void init(std::span<double> params, Rng& rng) const;

    /// Marks weight-matrix entries (not biases) in mask[offset..]; used for
    /// decoupled weight decay.
    void weight_mask(std::vector<std::uint8_t>& mask, std::size_t offset) const;

private:
    std::vector<std::size_t> dims_;
    Activation hidden_ = Activation::relu;
    std::size_t param_count_ = 0;
};

/// Learned linear temporal mixer: `filters` learned filters, each spanning
/// all `steps` timesteps, applied per predictor channel. Input is a
/// (steps x preds) row-major block; output is (filters x preds). Parameters:
/// [W (filters x steps), b (filters)].
class TemporalMixerSpec {
public:
    TemporalMixerSpec() = default;
    TemporalMixerSpec(std::size_t steps, std::size_t preds, std::size_t filters)
        : steps_(steps), preds_(preds), filters_(filters) {}

    bool enabled() const { return steps_ > 0; }
    std::size_t steps() const { return steps_; }
    std::size_t preds() const { return preds_; }
    std::size_t filters() const { return filters_; }
    std::size_t input_dim() const { return steps_ * preds_; }
    std::size_t output_dim() const { return filters_ * preds_; }
    std::size_t param_count() const { return enabled() ? filters_ * steps_ + filters_ : 0; }

    void forward(std::span<const double> params, std::span<const double> in,
                 std::span<double> out) const;
    void backward(std::span<const double> params, std::span<const double> in,
                  std::span<const double> dout, std::span<double> grad,
                  std::span<double> dinput) const;
    void init(std::span<double> params, Rng& rng) const;
    void weight_mask(std::vector<std::uint8_t>& mask, std::size_t offset) const;

private:
    std::size_t steps_ = 0, preds_ = 0, filters_ = 0;
};

/// Adam with the standard first/second moment defaults. lr_scale lets the
/// trainer anneal the step size; weight decay is decoupled (applied to the
/// parameters directly, masked).
class Adam {
public:
    Adam(std::size_t n, double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
         double eps = 1e-8);

    void step(std::span<double> params, std::span<const double> grad, double lr_scale = 1.0);

    void decay(std::span<double> params, std::span<const std::uint8_t> mask, double weight_decay,
               double lr_scale = 1.0);

private:
    double lr_, beta1_, beta2_, eps_;
    long t_ = 0;
    std::vector<double> m_, v_;
};

} // namespace pitcal
