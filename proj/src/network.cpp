#include "pitcal/network.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace pitcal {

double activate(Activation a, double x) {
    switch (a) {
    case Activation::relu: return x > 0.0 ? x : 0.0;
    case Activation::tanh_act: return std::tanh(x);
    case Activation::identity: return x;
    }
    return x;
}

double activate_grad(Activation a, double activated) {
    switch (a) {
    case Activation::relu: return activated > 0.0 ? 1.0 : 0.0;
    case Activation::tanh_act: return 1.0 - activated * activated;
    case Activation::identity: return 1.0;
    }
    return 1.0;
}

Standardizer Standardizer::fit(const Matrix& features) {
    Standardizer s;
    std::size_t n = features.rows(), d = features.cols();
    s.mean.assign(d, 0.0);
    s.scale.assign(d, 1.0);
    if (n == 0) return s;
    for (std::size_t j = 0; j < d; ++j) {
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i) m += features(i, j);
        m /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double c = features(i, j) - m;
            var += c * c;
        }
        var /= static_cast<double>(n);
        s.mean[j] = m;
        s.scale[j] = var > 1e-24 ? std::sqrt(var) : 1.0;
    }
    return s;
}

Standardizer Standardizer::identity(std::size_t dim) {
    Standardizer s;
    s.mean.assign(dim, 0.0);
    s.scale.assign(dim, 1.0);
    return s;
}

void Standardizer::apply(std::span<const double> in, std::span<double> out) const {
    assert(in.size() == mean.size() && out.size() == mean.size());
    for (std::size_t j = 0; j < mean.size(); ++j) out[j] = (in[j] - mean[j]) / scale[j];
}

std::vector<double> Standardizer::apply(std::span<const double> in) const {
    std::vector<double> out(in.size());
    apply(in, out);
    return out;
}

// ---------------------------------------------------------------------------
// MlpSpec

MlpSpec::MlpSpec(std::vector<std::size_t> dims, Activation hidden)
    : dims_(std::move(dims)), hidden_(hidden) {
    if (dims_.size() < 2) throw std::invalid_argument("MlpSpec: need at least input and output");
    for (std::size_t d : dims_)
        if (d == 0) throw std::invalid_argument("MlpSpec: zero-width layer");
    for (std::size_t l = 0; l + 1 < dims_.size(); ++l)
        param_count_ += dims_[l + 1] * dims_[l] + dims_[l + 1];
}

MlpSpec::Tape MlpSpec::make_tape() const {
    Tape t;
    t.act.resize(dims_.size());
    std::size_t widest = 0;
    for (std::size_t l = 0; l < dims_.size(); ++l) {
        t.act[l].resize(dims_[l]);
        widest = std::max(widest, dims_[l]);
    }
    t.delta_hi.resize(widest);
    t.delta_lo.resize(widest);
    return t;
}

void MlpSpec::forward(std::span<const double> params, std::span<const double> in,
                      Tape& tape) const {
    assert(params.size() == param_count_);
    assert(in.size() == dims_.front());
    std::copy(in.begin(), in.end(), tape.act[0].begin());
    std::size_t off = 0;
    const std::size_t n_layers = dims_.size() - 1;
    for (std::size_t l = 0; l < n_layers; ++l) {
        const std::size_t nin = dims_[l], nout = dims_[l + 1];
        const double* w = params.data() + off;
        const double* b = w + nout * nin;
        const double* src = tape.act[l].data();
        double* dst = tape.act[l + 1].data();
        const bool last = (l + 1 == n_layers);
        for (std::size_t o = 0; o < nout; ++o) {
            const double* wrow = w + o * nin;
            double acc = b[o];
            for (std::size_t k = 0; k < nin; ++k) acc += wrow[k] * src[k];
            dst[o] = last ? acc : activate(hidden_, acc);
        }
        off += nout * nin + nout;
    }
}

void MlpSpec::backward(std::span<const double> params, Tape& tape, std::span<const double> dout,
                       std::span<double> grad, std::span<double> dinput) const {
    assert(dout.size() == dims_.back());
    const std::size_t n_layers = dims_.size() - 1;
    // Offsets of each layer's parameter block.
    std::vector<std::size_t> offs(n_layers);
    std::size_t off = 0;
    for (std::size_t l = 0; l < n_layers; ++l) {
        offs[l] = off;
        off += dims_[l + 1] * dims_[l] + dims_[l + 1];
    }

    double* delta = tape.delta_hi.data();
    std::copy(dout.begin(), dout.end(), delta);
    for (std::size_t l = n_layers; l-- > 0;) {
        const std::size_t nin = dims_[l], nout = dims_[l + 1];
        const double* w = params.data() + offs[l];
        double* gw = grad.data() + offs[l];
        double* gb = gw + nout * nin;
        const double* src = tape.act[l].data();
        const bool last = (l + 1 == n_layers);
        if (!last) {
            const double* a = tape.act[l + 1].data();
            for (std::size_t o = 0; o < nout; ++o) delta[o] *= activate_grad(hidden_, a[o]);
        }
        for (std::size_t o = 0; o < nout; ++o) {
            double d = delta[o];
            double* grow = gw + o * nin;
            for (std::size_t k = 0; k < nin; ++k) grow[k] += d * src[k];
            gb[o] += d;
        }
        const bool need_dinput = (l > 0) || !dinput.empty();
        if (need_dinput) {
            double* down = tape.delta_lo.data();
            for (std::size_t k = 0; k < nin; ++k) down[k] = 0.0;
            for (std::size_t o = 0; o < nout; ++o) {
                const double* wrow = w + o * nin;
                double d = delta[o];
                for (std::size_t k = 0; k < nin; ++k) down[k] += wrow[k] * d;
            }
            if (l == 0) {
                for (std::size_t k = 0; k < nin; ++k) dinput[k] = down[k];
            } else {
                std::swap(tape.delta_hi, tape.delta_lo);
                delta = tape.delta_hi.data();
            }
        }
    }
}

void MlpSpec::init(std::span<double> params, Rng& rng) const {
    std::size_t off = 0;
    for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
        const std::size_t nin = dims_[l], nout = dims_[l + 1];
        double limit = hidden_ == Activation::relu
                           ? std::sqrt(6.0 / static_cast<double>(nin))
                           : std::sqrt(6.0 / static_cast<double>(nin + nout));
        for (std::size_t k = 0; k < nout * nin; ++k)
            params[off + k] = rng.uniform(-limit, limit);
        for (std::size_t k = 0; k < nout; ++k) params[off + nout * nin + k] = 0.0;
        off += nout * nin + nout;
    }
}

void MlpSpec::weight_mask(std::vector<std::uint8_t>& mask, std::size_t offset) const {
    std::size_t off = offset;
    for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
        const std::size_t nin = dims_[l], nout = dims_[l + 1];
        for (std::size_t k = 0; k < nout * nin; ++k) mask[off + k] = 1;
        off += nout * nin + nout;
    }
}

// ---------------------------------------------------------------------------
// TemporalMixerSpec

void TemporalMixerSpec::forward(std::span<const double> params, std::span<const double> in,
                                std::span<double> out) const {
    assert(in.size() == input_dim() && out.size() == output_dim());
    const double* w = params.data();
    const double* b = w + filters_ * steps_;
    for (std::size_t f = 0; f < filters_; ++f) {
        const double* wf = w + f * steps_;
        for (std::size_t j = 0; j < preds_; ++j) {
            double acc = b[f];
            for (std::size_t t = 0; t < steps_; ++t) acc += wf[t] * in[t * preds_ + j];
            out[f * preds_ + j] = acc;
        }
    }
}

void TemporalMixerSpec::backward(std::span<const double> params, std::span<const double> in,
                                 std::span<const double> dout, std::span<double> grad,
                                 std::span<double> dinput) const {
    const double* w = params.data();
    double* gw = grad.data();
    double* gb = gw + filters_ * steps_;
    if (!dinput.empty())
        for (std::size_t k = 0; k < input_dim(); ++k) dinput[k] = 0.0;
    for (std::size_t f = 0; f < filters_; ++f) {
        const double* wf = w + f * steps_;
        double* gwf = gw + f * steps_;
        for (std::size_t j = 0; j < preds_; ++j) {
            double d = dout[f * preds_ + j];
            for (std::size_t t = 0; t < steps_; ++t) {
                gwf[t] += d * in[t * preds_ + j];
                if (!dinput.empty()) dinput[t * preds_ + j] += wf[t] * d;
            }
            gb[f] += d;
        }
    }
}

void TemporalMixerSpec::init(std::span<double> params, Rng& rng) const {
    double limit = std::sqrt(6.0 / static_cast<double>(steps_));
    for (std::size_t k = 0; k < filters_ * steps_; ++k) params[k] = rng.uniform(-limit, limit);
    for (std::size_t f = 0; f < filters_; ++f) params[filters_ * steps_ + f] = 0.0;
}

void TemporalMixerSpec::weight_mask(std::vector<std::uint8_t>& mask, std::size_t offset) const {
    for (std::size_t k = 0; k < filters_ * steps_; ++k) mask[offset + k] = 1;
}

// ---------------------------------------------------------------------------
// Adam

Adam::Adam(std::size_t n, double learning_rate, double beta1, double beta2, double eps)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(eps), m_(n, 0.0), v_(n, 0.0) {}

void Adam::step(std::span<double> params, std::span<const double> grad, double lr_scale) {
    assert(params.size() == m_.size() && grad.size() == m_.size());
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    const double lr = lr_ * lr_scale;
    for (std::size_t i = 0; i < m_.size(); ++i) {
        m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
        v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
        params[i] -= lr * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
    }
}

void Adam::decay(std::span<double> params, std::span<const std::uint8_t> mask,
                 double weight_decay, double lr_scale) {
    if (weight_decay <= 0.0) return;
    const double shrink = 1.0 - lr_ * lr_scale * weight_decay;
    for (std::size_t i = 0; i < params.size(); ++i)
        if (mask[i]) params[i] *= shrink;
}

} // namespace pitcal
