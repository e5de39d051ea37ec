#include "pitcal/nonparametric.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pitcal/parametric.hpp" // FitError
#include "pitcal/special.hpp"

namespace pitcal {

namespace {

constexpr double kTrainNormFloor = 1e-6;
constexpr double kEvalNormFloor = 1e-12;

double softplus_inverse(double y) { return std::log(std::expm1(y)); }

} // namespace

// ---------------------------------------------------------------------------
// MonotonePathSpec

MonotonePathSpec::MonotonePathSpec(std::size_t width, std::size_t emb)
    : width_(width), emb_(emb) {
    if (width == 0 || emb == 0) throw std::invalid_argument("MonotonePathSpec: zero width");
    std::size_t off = 0;
    off_a1_ = off; off += width_;
    off_v1_ = off; off += width_ * emb_;
    off_b1_ = off; off += width_;
    off_a3_ = off; off += width_;
    off_v3_ = off; off += emb_;
    off_b3_ = off; off += 1;
    count_ = off;
}

void MonotonePathSpec::refresh(std::span<const double> params, Cache& cache) const {
    cache.a1.resize(width_);
    cache.a3.resize(width_);
    for (std::size_t i = 0; i < width_; ++i) cache.a1[i] = softplus(params[off_a1_ + i]);
    for (std::size_t i = 0; i < width_; ++i) cache.a3[i] = softplus(params[off_a3_ + i]);
}

void MonotonePathSpec::bind(std::span<const double> params, std::span<const double> emb,
                            Bound& bound) const {
    bound.base1.resize(width_);
    const double* v1 = params.data() + off_v1_;
    const double* b1 = params.data() + off_b1_;
    for (std::size_t i = 0; i < width_; ++i) {
        double acc = b1[i];
        const double* row = v1 + i * emb_;
        for (std::size_t k = 0; k < emb_; ++k) acc += row[k] * emb[k];
        bound.base1[i] = acc;
    }
    const double* v3 = params.data() + off_v3_;
    double acc = params[off_b3_];
    for (std::size_t k = 0; k < emb_; ++k) acc += v3[k] * emb[k];
    bound.base_out = acc;
}

double MonotonePathSpec::forward(const Cache& cache, const Bound& bound, double alpha,
                                 Tape& tape) const {
    const std::size_t w = width_;
    tape.alpha = alpha;
    tape.u1.resize(w);
    double acc = bound.base_out;
    for (std::size_t i = 0; i < w; ++i) {
        double u = std::tanh(cache.a1[i] * alpha + bound.base1[i]);
        tape.u1[i] = u;
        acc += cache.a3[i] * u;
    }
    tape.out = acc;
    tape.squashed = sigmoid(acc);
    return tape.squashed;
}

void MonotonePathSpec::backward(std::span<const double> params, const Cache& cache,
                                const Tape& tape, std::span<const double> emb, double d_squashed,
                                std::span<double> grad, std::span<double> demb) const {
    const std::size_t w = width_, e = emb_;
    const double dout = d_squashed * tape.squashed * (1.0 - tape.squashed);
    double* g_a1 = grad.data() + off_a1_;
    double* g_v1 = grad.data() + off_v1_;
    double* g_b1 = grad.data() + off_b1_;
    double* g_a3 = grad.data() + off_a3_;
    double* g_v3 = grad.data() + off_v3_;
    for (std::size_t k = 0; k < e; ++k) {
        g_v3[k] += dout * emb[k];
        demb[k] += dout * params[off_v3_ + k];
    }
    grad[off_b3_] += dout;
    for (std::size_t i = 0; i < w; ++i) {
        const double u = tape.u1[i];
        g_a3[i] += dout * u;
        const double di = dout * cache.a3[i] * (1.0 - u * u);
        g_a1[i] += di * tape.alpha;
        g_b1[i] += di;
        double* gvrow = g_v1 + i * e;
        const double* vrow = params.data() + off_v1_ + i * e;
        for (std::size_t k = 0; k < e; ++k) {
            gvrow[k] += di * emb[k];
            demb[k] += vrow[k] * di;
        }
    }
}

void MonotonePathSpec::finalize_grad(std::span<const double> params, std::span<double> grad) const {
    for (std::size_t i = 0; i < width_; ++i)
        grad[off_a1_ + i] *= sigmoid(params[off_a1_ + i]);
    for (std::size_t i = 0; i < width_; ++i)
        grad[off_a3_ + i] *= sigmoid(params[off_a3_ + i]);
}

void MonotonePathSpec::init(std::span<double> params, Rng& rng) const {
    // Each unit is a tanh step in alpha; spread the transition centers over
    // [0,1] so the bank starts as a flexible CDF-like basis.
    const double c1 = softplus_inverse(6.0);
    const double c3 = softplus_inverse(1.0 / std::sqrt(static_cast<double>(width_)));
    for (std::size_t i = 0; i < width_; ++i) {
        params[off_a1_ + i] = c1 + rng.uniform(-0.5, 0.5);
        double center = (static_cast<double>(i) + 0.5) / static_cast<double>(width_);
        double slope = softplus(params[off_a1_ + i]);
        params[off_b1_ + i] = -slope * center + rng.uniform(-0.1, 0.1);
        params[off_a3_ + i] = c3 + rng.uniform(-0.5, 0.5);
    }
    double lim_v = std::sqrt(6.0 / static_cast<double>(emb_ + width_));
    for (std::size_t i = 0; i < width_ * emb_; ++i)
        params[off_v1_ + i] = rng.uniform(-lim_v, lim_v);
    double lim_o = std::sqrt(6.0 / static_cast<double>(emb_ + 1));
    for (std::size_t k = 0; k < emb_; ++k) params[off_v3_ + k] = rng.uniform(-lim_o, lim_o);
    params[off_b3_] = 0.0;
}

void MonotonePathSpec::weight_mask(std::vector<std::uint8_t>& mask, std::size_t offset) const {
    for (std::size_t i = 0; i < width_ * emb_; ++i) mask[offset + off_v1_ + i] = 1;
    for (std::size_t k = 0; k < emb_; ++k) mask[offset + off_v3_ + k] = 1;
}

// ---------------------------------------------------------------------------
// MonotoneNet

MonotoneNet::MonotoneNet(MlpSpec cov, MonotonePathSpec path, std::vector<double> params,
                         Standardizer standardizer, TrainConfig config)
    : cov_(std::move(cov)), path_(std::move(path)), params_(std::move(params)),
      standardizer_(std::move(standardizer)), config_(std::move(config)) {
    if (params_.size() != cov_.param_count() + path_.param_count())
        throw std::invalid_argument("MonotoneNet: parameter count mismatch");
    path_.refresh(std::span<const double>(params_).subspan(cov_.param_count()), cache_);
}

namespace {

class MonotoneCurve final : public PitCurve {
public:
    MonotoneCurve(const MonotonePathSpec& path, const MonotonePathSpec::Cache& cache,
                  MonotonePathSpec::Bound bound)
        : path_(path), cache_(cache), bound_(std::move(bound)) {
        MonotonePathSpec::Tape tape;
        s0_ = path_.forward(cache_, bound_, 0.0, tape);
        s1_ = path_.forward(cache_, bound_, 1.0, tape);
        degenerate_ = (s1_ - s0_) < kEvalNormFloor;
    }

    double operator()(double alpha) const override {
        if (!(alpha >= 0.0 && alpha <= 1.0))
            throw std::domain_error("MonotoneCurve: alpha outside [0,1]");
        if (degenerate_) return alpha;
        MonotonePathSpec::Tape tape;
        double s = path_.forward(cache_, bound_, alpha, tape);
        double g = (s - s0_) / (s1_ - s0_);
        return std::min(std::max(g, 0.0), 1.0);
    }

    bool used_identity_fallback() const override { return degenerate_; }

private:
    const MonotonePathSpec& path_;
    const MonotonePathSpec::Cache& cache_;
    MonotonePathSpec::Bound bound_;
    double s0_, s1_;
    bool degenerate_;
};

} // namespace

std::unique_ptr<PitCurve> MonotoneNet::curve(std::span<const double> x) const {
    if (x.size() != cov_.input_dim())
        throw std::invalid_argument("MonotoneNet: covariate dimension mismatch");
    MlpSpec::Tape tape = cov_.make_tape();
    std::vector<double> x_std = standardizer_.apply(x);
    cov_.forward(std::span<const double>(params_).first(cov_.param_count()), x_std, tape);
    MonotonePathSpec::Bound bound;
    path_.bind(std::span<const double>(params_).subspan(cov_.param_count()), cov_.output(tape),
               bound);
    return std::make_unique<MonotoneCurve>(path_, cache_, std::move(bound));
}

std::size_t monotone_width_schedule(std::size_t n) {
    if (n < 50) return 8;
    if (n < 200) return 16;
    if (n < 1000) return 32;
    return 64;
}

TrainConfig nonparametric_defaults(std::size_t n, std::uint64_t seed) {
    TrainConfig c;
    c.learning_rate = 3e-3;
    c.weight_decay = 1e-2;
    c.hidden_sizes.clear(); // width from the capacity schedule
    // Small samples need many passes; large samples already take many Adam
    // steps per epoch.
    c.epochs = std::clamp<std::size_t>(n == 0 ? 400 : 60000 / std::max<std::size_t>(n, 1), 40, 400);
    c.seed = seed;
    return c;
}

MonotoneNet fit_nonparametric(const CalibrationSet& calib, const PitSample& pit,
                              const TrainConfig& config) {
    config.validate();
    const std::size_t n = calib.size();
    if (pit.z.size() != n)
        throw FitError("fit_nonparametric: PIT sample size != calibration size");
    if (n < 2) throw FitError("fit_nonparametric: need at least two calibration pairs");
    {
        bool all_low = true, all_high = true;
        for (double zi : pit.z) {
            all_low = all_low && zi <= 1e-12;
            all_high = all_high && zi >= 1.0 - 1e-12;
        }
        if (all_low)
            throw FitError("fit_nonparametric: degenerate data, all PIT values at the lower endpoint");
        if (all_high)
            throw FitError("fit_nonparametric: degenerate data, all PIT values at the upper endpoint");
    }

    const std::size_t width =
        config.hidden_sizes.empty() ? monotone_width_schedule(n) : config.hidden_sizes.front();
    const std::size_t d = calib.dim();

    Standardizer standardizer = Standardizer::fit(calib.features);
    Matrix x_std(n, d);
    for (std::size_t i = 0; i < n; ++i) standardizer.apply(calib.x(i), x_std.row(i));

    MlpSpec cov({d, width, width}, Activation::relu);
    MonotonePathSpec path(width, width);
    std::vector<double> params(cov.param_count() + path.param_count());

    Rng init_rng = Rng::substream(config.seed, {Rng::tag("nonparametric_init")});
    cov.init(std::span<double>(params).first(cov.param_count()), init_rng);
    path.init(std::span<double>(params).subspan(cov.param_count()), init_rng);

    auto cov_params = [&]() { return std::span<const double>(params).first(cov.param_count()); };
    auto path_params = [&]() {
        return std::span<const double>(params).subspan(cov.param_count());
    };

    std::vector<double> grad(params.size());
    auto grad_cov = [&]() { return std::span<double>(grad).first(cov.param_count()); };
    auto grad_path = [&]() { return std::span<double>(grad).subspan(cov.param_count()); };

    Adam adam(params.size(), config.learning_rate);
    std::vector<std::uint8_t> decay_mask(params.size(), 0);
    cov.weight_mask(decay_mask, 0);
    path.weight_mask(decay_mask, cov.param_count());

    MonotonePathSpec::Cache cache;
    path.refresh(path_params(), cache);

    MlpSpec::Tape cov_tape = cov.make_tape();
    MonotonePathSpec::Bound bound;
    MonotonePathSpec::Tape tape_alpha, tape0, tape1;
    std::vector<double> demb(width);
    std::vector<double> dinput; // unused

    constexpr std::size_t kAlphasPerPair = 8;
    std::vector<double> alphas(n * kAlphasPerPair);
    Rng alpha_rng = Rng::substream(config.seed, {Rng::tag("nonparametric_alpha")});
    Rng shuffle_rng = Rng::substream(config.seed, {Rng::tag("nonparametric_shuffle")});

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const bool full_batch = n < config.batch_size;
    const std::size_t steps_per_epoch = (n + config.batch_size - 1) / config.batch_size;
    const std::size_t total_steps = steps_per_epoch * config.epochs;
    std::size_t step_index = 0;
    auto lr_scale = [&]() {
        return 1.0 - 0.95 * static_cast<double>(step_index) /
                         static_cast<double>(std::max<std::size_t>(total_steps - 1, 1));
    };

    std::vector<std::size_t> checkpoint_epochs;
    for (int k = 1; k <= 5; ++k) {
        std::size_t e = std::max<std::size_t>(1, config.epochs * k / 5);
        if (checkpoint_epochs.empty() || checkpoint_epochs.back() != e)
            checkpoint_epochs.push_back(e);
    }
    std::vector<std::pair<std::size_t, double>> checkpoints;

    // Fixed grid for comparable checkpoint losses across epochs.
    auto fixed_grid_brier = [&](const MonotonePathSpec::Cache& c) {
        const std::size_t grid = 21;
        double total = 0.0;
        MonotonePathSpec::Tape t;
        MonotonePathSpec::Bound b;
        for (std::size_t i = 0; i < n; ++i) {
            cov.forward(cov_params(), x_std.row(i), cov_tape);
            path.bind(path_params(), cov.output(cov_tape), b);
            double s0 = path.forward(c, b, 0.0, t);
            double s1 = path.forward(c, b, 1.0, t);
            double denom = std::max(s1 - s0, kTrainNormFloor);
            for (std::size_t k = 0; k < grid; ++k) {
                double alpha = static_cast<double>(k) / static_cast<double>(grid - 1);
                double s = path.forward(c, b, alpha, t);
                double g = (s - s0) / denom;
                double err = g - (pit.z[i] <= alpha ? 1.0 : 0.0);
                total += err * err;
            }
        }
        return total / static_cast<double>(n * grid);
    };

    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        // Fresh alpha draws each epoch: six uniform plus one in each endpoint
        // neighborhood, drawn in pair-index order.
        for (std::size_t i = 0; i < n; ++i) {
            double* a = alphas.data() + i * kAlphasPerPair;
            for (std::size_t k = 0; k < 6; ++k) a[k] = alpha_rng.uniform01();
            a[6] = alpha_rng.uniform(0.0, 0.1);
            a[7] = alpha_rng.uniform(0.9, 1.0);
        }
        if (!full_batch) {
            for (std::size_t i = n - 1; i > 0; --i)
                std::swap(order[i], order[shuffle_rng.below(i + 1)]);
        }
        for (std::size_t start = 0; start < n; start += config.batch_size) {
            const std::size_t len = std::min(config.batch_size, n - start);
            std::fill(grad.begin(), grad.end(), 0.0);
            const double inv_m = 1.0 / static_cast<double>(len * kAlphasPerPair);
            for (std::size_t bi = 0; bi < len; ++bi) {
                const std::size_t i = order[start + bi];
                cov.forward(cov_params(), x_std.row(i), cov_tape);
                auto emb = cov.output(cov_tape);
                path.bind(path_params(), emb, bound);
                std::fill(demb.begin(), demb.end(), 0.0);
                double s0 = path.forward(cache, bound, 0.0, tape0);
                double s1 = path.forward(cache, bound, 1.0, tape1);
                double denom_raw = s1 - s0;
                bool clamped = denom_raw < kTrainNormFloor;
                double denom = clamped ? kTrainNormFloor : denom_raw;
                double d0_acc = 0.0, d1_acc = 0.0;
                for (std::size_t k = 0; k < kAlphasPerPair; ++k) {
                    double alpha = alphas[i * kAlphasPerPair + k];
                    double s = path.forward(cache, bound, alpha, tape_alpha);
                    double g = (s - s0) / denom;
                    double target = pit.z[i] <= alpha ? 1.0 : 0.0;
                    double dg = 2.0 * (g - target) * inv_m;
                    double ds = dg / denom;
                    double d0, d1;
                    if (clamped) {
                        d0 = -dg / denom;
                        d1 = 0.0;
                    } else {
                        d0 = dg * (s - s1) / (denom * denom);
                        d1 = -dg * (s - s0) / (denom * denom);
                    }
                    path.backward(path_params(), cache, tape_alpha, emb, ds, grad_path(), demb);
                    d0_acc += d0;
                    d1_acc += d1;
                }
                path.backward(path_params(), cache, tape0, emb, d0_acc, grad_path(), demb);
                path.backward(path_params(), cache, tape1, emb, d1_acc, grad_path(), demb);
                cov.backward(cov_params(), cov_tape, demb, grad_cov(), dinput);
            }
            path.finalize_grad(path_params(), grad_path());
            double scale = lr_scale();
            adam.step(params, grad, scale);
            adam.decay(params, decay_mask, config.weight_decay, scale);
            ++step_index;
            path.refresh(path_params(), cache);
        }
        if (std::find(checkpoint_epochs.begin(), checkpoint_epochs.end(), epoch) !=
            checkpoint_epochs.end())
            checkpoints.emplace_back(epoch, fixed_grid_brier(cache));
    }

    if (!checkpoints.empty() && !std::isfinite(checkpoints.back().second))
        throw FitError("fit_nonparametric: training diverged to a non-finite loss");

    TrainConfig stored = config;
    if (stored.hidden_sizes.empty()) stored.hidden_sizes = {width};
    MonotoneNet model(std::move(cov), std::move(path), std::move(params),
                      std::move(standardizer), std::move(stored));
    model.checkpoints_ = std::move(checkpoints);
    return model;
}

double pit_brier(const PitModel& model, const CalibrationSet& calib, const PitSample& pit,
                 std::size_t grid_size) {
    double total = 0.0;
    for (std::size_t i = 0; i < calib.size(); ++i) {
        auto curve = model.curve(calib.x(i));
        for (std::size_t k = 0; k < grid_size; ++k) {
            double alpha = static_cast<double>(k) / static_cast<double>(grid_size - 1);
            double err = (*curve)(alpha) - (pit.z[i] <= alpha ? 1.0 : 0.0);
            total += err * err;
        }
    }
    return total / static_cast<double>(calib.size() * grid_size);
}

nlohmann::json MonotoneNet::to_json() const {
    nlohmann::json j;
    j["kind"] = kind();
    j["version"] = 1;
    j["seed"] = config_.seed;
    j["standardization"] = {{"mean", standardizer_.mean}, {"scale", standardizer_.scale}};
    j["config"] = {{"learning_rate", config_.learning_rate},
                   {"weight_decay", config_.weight_decay},
                   {"epochs", config_.epochs},
                   {"batch_size", config_.batch_size},
                   {"hidden_sizes", config_.hidden_sizes},
                   {"parameter_floor", config_.parameter_floor},
                   {"mixer_steps", config_.mixer_steps},
                   {"mixer_filters", config_.mixer_filters}};
    j["architecture"] = {{"cov_dims", cov_.dims()}, {"width", path_.width()},
                         {"emb", path_.emb()}};
    j["weights"] = params_;
    return j;
}

MonotoneNet MonotoneNet::from_json(const nlohmann::json& j) {
    if (j.at("kind").get<std::string>() != "nonparametric")
        throw std::invalid_argument("MonotoneNet::from_json: wrong kind");
    TrainConfig config;
    const auto& jc = j.at("config");
    config.learning_rate = jc.at("learning_rate").get<double>();
    config.weight_decay = jc.at("weight_decay").get<double>();
    config.epochs = jc.at("epochs").get<std::size_t>();
    config.batch_size = jc.at("batch_size").get<std::size_t>();
    config.hidden_sizes = jc.at("hidden_sizes").get<std::vector<std::size_t>>();
    config.parameter_floor = jc.at("parameter_floor").get<double>();
    config.mixer_steps = jc.at("mixer_steps").get<std::size_t>();
    config.mixer_filters = jc.at("mixer_filters").get<std::size_t>();
    config.seed = j.at("seed").get<std::uint64_t>();

    const auto& ja = j.at("architecture");
    MlpSpec cov(ja.at("cov_dims").get<std::vector<std::size_t>>(), Activation::relu);
    MonotonePathSpec path(ja.at("width").get<std::size_t>(), ja.at("emb").get<std::size_t>());
    auto params = j.at("weights").get<std::vector<double>>();

    Standardizer standardizer;
    standardizer.mean = j.at("standardization").at("mean").get<std::vector<double>>();
    standardizer.scale = j.at("standardization").at("scale").get<std::vector<double>>();
    if (standardizer.dim() != cov.input_dim())
        throw std::invalid_argument("MonotoneNet::from_json: standardizer dim mismatch");

    return MonotoneNet(std::move(cov), std::move(path), std::move(params),
                       std::move(standardizer), std::move(config));
}

} // namespace pitcal
