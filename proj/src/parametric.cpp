#include "pitcal/parametric.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pitcal {

namespace {

constexpr double kZClamp = 1e-12;

struct NllTerms {
    double value;
    double da; // d nll / d a
    double db; // d nll / d b
};

// nll = -(log a + log b + (a-1) log z + (b-1) log(1 - z^a)) with z already
// clamped away from {0,1}. Uses expm1 so both z -> 0 and z -> 1 stay exact.
NllTerms kuma_nll(double a, double b, double z) {
    double logz = std::log(z);
    double t = a * logz;                  // log(z^a) <= 0
    double one_minus_za = -std::expm1(t); // 1 - z^a in (0,1)
    double log1mza = std::log(one_minus_za);
    NllTerms out;
    out.value = -(std::log(a) + std::log(b) + (a - 1.0) * logz + (b - 1.0) * log1mza);
    // d/da log(1-z^a) = -z^a logz / (1-z^a) = -logz / expm1(-t)
    out.da = -1.0 / a - logz + (b - 1.0) * logz / std::expm1(-t);
    out.db = -1.0 / b - log1mza;
    return out;
}

// Scratch buffers reused across samples.
struct Workspace {
    std::vector<double> mixed;   // mixer output
    std::vector<double> dmixed;  // gradient into mixer output
    MlpSpec::Tape tape;
};

// Pooled (covariate-free) maximum likelihood fit used to warm-start the
// network: for fixed a the optimal b is closed form, the profile in a is
// minimized on a coarse log grid with golden-section refinement.
KumaraswamyParams pooled_kuma_mle(std::span<const double> z) {
    const double n = static_cast<double>(z.size());
    auto b_of = [&](double a) {
        double s = 0.0;
        for (double v : z) s += std::log(-std::expm1(a * std::log(v)));
        return -n / s;
    };
    auto profile = [&](double log_a) {
        double a = std::exp(log_a);
        double sum_logz = 0.0, sum_log1mza = 0.0;
        for (double v : z) {
            double logv = std::log(v);
            sum_logz += logv;
            sum_log1mza += std::log(-std::expm1(a * logv));
        }
        double b = -n / sum_log1mza;
        return -(n * std::log(a) + n * std::log(b) + (a - 1.0) * sum_logz +
                 (b - 1.0) * sum_log1mza);
    };
    const double lo = std::log(0.05), hi = std::log(50.0);
    const int grid = 64;
    double best = lo, best_val = profile(lo);
    for (int k = 1; k <= grid; ++k) {
        double la = lo + (hi - lo) * k / grid;
        double val = profile(la);
        if (val < best_val) {
            best_val = val;
            best = la;
        }
    }
    double step = (hi - lo) / grid;
    double a_lo = best - step, a_hi = best + step;
    const double gr = 0.6180339887498949;
    double x1 = a_hi - gr * (a_hi - a_lo), x2 = a_lo + gr * (a_hi - a_lo);
    double f1 = profile(x1), f2 = profile(x2);
    for (int it = 0; it < 60; ++it) {
        if (f1 < f2) {
            a_hi = x2; x2 = x1; f2 = f1;
            x1 = a_hi - gr * (a_hi - a_lo);
            f1 = profile(x1);
        } else {
            a_lo = x1; x1 = x2; f1 = f2;
            x2 = a_lo + gr * (a_hi - a_lo);
            f2 = profile(x2);
        }
    }
    double a = std::exp(0.5 * (a_lo + a_hi));
    return {a, b_of(a)};
}

} // namespace

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw FitError("TrainConfig: learning_rate must be positive");
    if (weight_decay < 0.0) throw FitError("TrainConfig: weight_decay must be nonnegative");
    if (epochs == 0) throw FitError("TrainConfig: epochs must be positive");
    if (batch_size == 0) throw FitError("TrainConfig: batch_size must be positive");
    if (!(parameter_floor > 0.0)) throw FitError("TrainConfig: parameter_floor must be positive");
    for (std::size_t h : hidden_sizes)
        if (h == 0) throw FitError("TrainConfig: zero hidden width");
}

KumaraswamyParams ThetaNetwork::theta(std::span<const double> x_std) const {
    Workspace ws;
    ws.tape = mlp.make_tape();
    std::span<const double> params_all{params};
    std::span<const double> mlp_in = x_std;
    if (mixer.enabled()) {
        ws.mixed.resize(mixer.output_dim());
        mixer.forward(params_all.first(mixer.param_count()), x_std, ws.mixed);
        mlp_in = ws.mixed;
    }
    mlp.forward(params_all.subspan(mixer.param_count()), mlp_in, ws.tape);
    auto raw = mlp.output(ws.tape);
    return {floor + softplus(raw[0]), floor + softplus(raw[1])};
}

namespace {

// One sample's loss and parameter-gradient contribution (+= into grad).
double nll_sample_grad(const ThetaNetwork& net, Workspace& ws, std::span<const double> x_std,
                       double z, std::span<double> grad) {
    std::span<const double> params_all{net.params};
    const std::size_t nm = net.mixer.param_count();
    std::span<const double> mlp_in = x_std;
    if (net.mixer.enabled()) {
        ws.mixed.resize(net.mixer.output_dim());
        net.mixer.forward(params_all.first(nm), x_std, ws.mixed);
        mlp_in = ws.mixed;
    }
    net.mlp.forward(params_all.subspan(nm), mlp_in, ws.tape);
    auto raw = net.mlp.output(ws.tape);
    double a = net.floor + softplus(raw[0]);
    double b = net.floor + softplus(raw[1]);
    NllTerms terms = kuma_nll(a, b, z);
    if (grad.empty()) return terms.value;

    double dout[2] = {terms.da * sigmoid(raw[0]), terms.db * sigmoid(raw[1])};
    if (net.mixer.enabled()) {
        ws.dmixed.resize(net.mixer.output_dim());
        net.mlp.backward(params_all.subspan(nm), ws.tape, dout, grad.subspan(nm), ws.dmixed);
        net.mixer.backward(params_all.first(nm), x_std, ws.dmixed, grad.first(nm), {});
    } else {
        net.mlp.backward(params_all.subspan(nm), ws.tape, dout, grad.subspan(nm), {});
    }
    return terms.value;
}

double nll_over(const ThetaNetwork& net, Workspace& ws, const Matrix& x_std,
                std::span<const double> z, std::span<const std::size_t> idx,
                std::span<double> grad) {
    double total = 0.0;
    for (std::size_t i : idx) total += nll_sample_grad(net, ws, x_std.row(i), z[i], grad);
    double inv = 1.0 / static_cast<double>(idx.size());
    for (double& g : grad) g *= inv;
    return total * inv;
}

} // namespace

double parametric_nll(const ThetaNetwork& net, const Matrix& x_std, std::span<const double> z) {
    Workspace ws;
    ws.tape = net.mlp.make_tape();
    double total = 0.0;
    for (std::size_t i = 0; i < x_std.rows(); ++i)
        total += nll_sample_grad(net, ws, x_std.row(i), z[i], {});
    return total / static_cast<double>(x_std.rows());
}

double parametric_nll_grad(const ThetaNetwork& net, const Matrix& x_std,
                           std::span<const double> z, std::span<double> grad) {
    Workspace ws;
    ws.tape = net.mlp.make_tape();
    std::fill(grad.begin(), grad.end(), 0.0);
    std::vector<std::size_t> idx(x_std.rows());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    return nll_over(net, ws, x_std, z, idx, grad);
}

ParametricPitModel::ParametricPitModel(ThetaNetwork net, Standardizer standardizer,
                                       TrainConfig config)
    : net_(std::move(net)), standardizer_(std::move(standardizer)), config_(std::move(config)) {}

KumaraswamyParams ParametricPitModel::theta(std::span<const double> x) const {
    if (x.size() != net_.input_dim())
        throw std::invalid_argument("ParametricPitModel: covariate dimension mismatch");
    return net_.theta(standardizer_.apply(x));
}

namespace {

class ParametricCurve final : public PitCurve {
public:
    explicit ParametricCurve(KumaraswamyParams p) : dist_(p) {}
    double operator()(double alpha) const override { return dist_.cdf(alpha); }
    bool has_density() const override { return true; }
    double density(double alpha) const override { return dist_.pdf(alpha); }

private:
    KumaraswamyDistribution dist_;
};

} // namespace

std::unique_ptr<PitCurve> ParametricPitModel::curve(std::span<const double> x) const {
    return std::make_unique<ParametricCurve>(theta(x));
}

ParametricPitModel fit_parametric(const CalibrationSet& calib, const PitSample& pit,
                                  const TrainConfig& config) {
    config.validate();
    const std::size_t n = calib.size();
    if (pit.z.size() != n) throw FitError("fit_parametric: PIT sample size != calibration size");
    if (n < 2) throw FitError("fit_parametric: need at least two calibration pairs");

    std::vector<double> z(n);
    bool all_low = true, all_high = true;
    for (std::size_t i = 0; i < n; ++i) {
        z[i] = std::min(std::max(pit.z[i], kZClamp), 1.0 - kZClamp);
        all_low = all_low && pit.z[i] <= kZClamp;
        all_high = all_high && pit.z[i] >= 1.0 - kZClamp;
    }
    if (all_low) throw FitError("fit_parametric: degenerate data, all PIT values at the lower endpoint");
    if (all_high) throw FitError("fit_parametric: degenerate data, all PIT values at the upper endpoint");

    Standardizer standardizer = Standardizer::fit(calib.features);
    Matrix x_std(n, calib.dim());
    for (std::size_t i = 0; i < n; ++i) standardizer.apply(calib.x(i), x_std.row(i));

    ThetaNetwork net;
    net.floor = config.parameter_floor;
    std::size_t mlp_input = calib.dim();
    if (config.mixer_steps > 0) {
        if (calib.dim() % config.mixer_steps != 0)
            throw FitError("fit_parametric: feature dimension not divisible by mixer_steps");
        net.mixer = TemporalMixerSpec(config.mixer_steps, calib.dim() / config.mixer_steps,
                                      config.mixer_filters);
        mlp_input = net.mixer.output_dim();
    }
    std::vector<std::size_t> dims;
    dims.push_back(mlp_input);
    std::vector<std::size_t> hidden =
        config.hidden_sizes.empty() ? std::vector<std::size_t>{64, 64, 64} : config.hidden_sizes;
    dims.insert(dims.end(), hidden.begin(), hidden.end());
    dims.push_back(2);
    net.mlp = MlpSpec(std::move(dims), Activation::relu);

    net.params.resize(net.param_count());
    Rng init_rng = Rng::substream(config.seed, {Rng::tag("parametric_init")});
    if (net.mixer.enabled())
        net.mixer.init(std::span<double>(net.params).first(net.mixer.param_count()), init_rng);
    net.mlp.init(std::span<double>(net.params).subspan(net.mixer.param_count()), init_rng);
    // Warm-start theta(x) at the pooled 1-D MLE via the output biases (the
    // last two parameters); training then only has to learn the covariate
    // dependence around the global fit. The pooled estimate is shrunk toward
    // the uniform member in log space with weight n/(n+8), which tames the
    // MLE's small-sample blowups and is negligible by n ~ 10^3.
    KumaraswamyParams pooled = pooled_kuma_mle(z);
    double shrink = static_cast<double>(n) / (static_cast<double>(n) + 8.0);
    pooled.a = std::exp(std::log(pooled.a) * shrink);
    pooled.b = std::exp(std::log(pooled.b) * shrink);
    net.params[net.param_count() - 2] =
        std::log(std::expm1(std::max(pooled.a - net.floor, 1e-6)));
    net.params[net.param_count() - 1] =
        std::log(std::expm1(std::max(pooled.b - net.floor, 1e-6)));

    Workspace ws;
    ws.tape = net.mlp.make_tape();
    std::vector<double> grad(net.param_count());
    Adam adam(net.param_count(), config.learning_rate);
    std::vector<std::uint8_t> decay_mask(net.param_count(), 0);
    if (net.mixer.enabled()) net.mixer.weight_mask(decay_mask, 0);
    net.mlp.weight_mask(decay_mask, net.mixer.param_count());

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const bool full_batch = n < config.batch_size;
    const std::size_t steps_per_epoch = (n + config.batch_size - 1) / config.batch_size;
    const std::size_t total_steps = steps_per_epoch * config.epochs;
    std::size_t step_index = 0;
    // Linear learning-rate anneal to 5% of the initial step.
    auto lr_scale = [&]() {
        return 1.0 - 0.95 * static_cast<double>(step_index) /
                         static_cast<double>(std::max<std::size_t>(total_steps - 1, 1));
    };

    // Checkpoint the full-data loss at five evenly spaced epochs.
    std::vector<std::size_t> checkpoint_epochs;
    for (int k = 1; k <= 5; ++k) {
        std::size_t e = std::max<std::size_t>(1, config.epochs * k / 5);
        if (checkpoint_epochs.empty() || checkpoint_epochs.back() != e)
            checkpoint_epochs.push_back(e);
    }

    std::vector<std::pair<std::size_t, double>> checkpoints;
    Rng shuffle_rng = Rng::substream(config.seed, {Rng::tag("parametric_shuffle")});
    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        if (!full_batch) {
            for (std::size_t i = n - 1; i > 0; --i)
                std::swap(order[i], order[shuffle_rng.below(i + 1)]);
        }
        for (std::size_t start = 0; start < n; start += config.batch_size) {
            std::size_t len = std::min(config.batch_size, n - start);
            std::fill(grad.begin(), grad.end(), 0.0);
            nll_over(net, ws, x_std, z, std::span<const std::size_t>(order).subspan(start, len),
                     grad);
            double scale = lr_scale();
            adam.step(net.params, grad, scale);
            adam.decay(net.params, decay_mask, config.weight_decay, scale);
            ++step_index;
        }
        if (std::find(checkpoint_epochs.begin(), checkpoint_epochs.end(), epoch) !=
            checkpoint_epochs.end()) {
            double loss = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                loss += nll_sample_grad(net, ws, x_std.row(i), z[i], {});
            checkpoints.emplace_back(epoch, loss / static_cast<double>(n));
        }
    }

    double final_loss = checkpoints.empty() ? 0.0 : checkpoints.back().second;
    if (!std::isfinite(final_loss))
        throw FitError("fit_parametric: training diverged to a non-finite loss");

    ParametricPitModel model(std::move(net), std::move(standardizer), config);
    model.checkpoints_ = std::move(checkpoints);
    return model;
}

nlohmann::json ParametricPitModel::to_json() const {
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
    j["architecture"] = {{"mlp_dims", net_.mlp.dims()},
                         {"activation", "relu"},
                         {"floor", net_.floor},
                         {"mixer",
                          {{"steps", net_.mixer.steps()},
                           {"preds", net_.mixer.preds()},
                           {"filters", net_.mixer.filters()}}}};
    j["weights"] = net_.params;
    return j;
}

ParametricPitModel ParametricPitModel::from_json(const nlohmann::json& j) {
    if (j.at("kind").get<std::string>() != "parametric")
        throw std::invalid_argument("ParametricPitModel::from_json: wrong kind");
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

    ThetaNetwork net;
    const auto& ja = j.at("architecture");
    net.floor = ja.at("floor").get<double>();
    auto dims = ja.at("mlp_dims").get<std::vector<std::size_t>>();
    net.mlp = MlpSpec(std::move(dims), Activation::relu);
    const auto& jm = ja.at("mixer");
    std::size_t steps = jm.at("steps").get<std::size_t>();
    if (steps > 0)
        net.mixer = TemporalMixerSpec(steps, jm.at("preds").get<std::size_t>(),
                                      jm.at("filters").get<std::size_t>());
    net.params = j.at("weights").get<std::vector<double>>();
    if (net.params.size() != net.param_count())
        throw std::invalid_argument("ParametricPitModel::from_json: weight count mismatch");

    Standardizer standardizer;
    standardizer.mean = j.at("standardization").at("mean").get<std::vector<double>>();
    standardizer.scale = j.at("standardization").at("scale").get<std::vector<double>>();
    if (standardizer.dim() != net.input_dim())
        throw std::invalid_argument("ParametricPitModel::from_json: standardizer dim mismatch");

    return ParametricPitModel(std::move(net), std::move(standardizer), std::move(config));
}

} // namespace pitcal
