#include <doctest.h>

#include <cmath>
#include <vector>

#include "pitcal/network.hpp"
#include "pitcal/rng.hpp"

using namespace pitcal;

TEST_CASE("MlpSpec forward matches a hand computation") {
    // 2 -> 2 (tanh) -> 1, parameters [W0 b0 W1 b1].
    MlpSpec net({2, 2, 1}, Activation::tanh_act);
    std::vector<double> p = {0.5, -0.25, 0.1, 0.2, /*b0*/ 0.05, -0.1,
                             /*W1*/ 1.5, -2.0, /*b1*/ 0.3};
    REQUIRE(net.param_count() == p.size());
    auto tape = net.make_tape();
    std::vector<double> in = {0.4, -0.6};
    net.forward(p, in, tape);
    double h0 = std::tanh(0.5 * 0.4 + (-0.25) * (-0.6) + 0.05);
    double h1 = std::tanh(0.1 * 0.4 + 0.2 * (-0.6) - 0.1);
    double expected = 1.5 * h0 - 2.0 * h1 + 0.3;
    CHECK(net.output(tape)[0] == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("MlpSpec backward agrees with finite differences") {
    MlpSpec net({3, 5, 4, 2}, Activation::tanh_act);
    Rng rng(17);
    std::vector<double> p(net.param_count());
    net.init(p, rng);
    for (double& v : p) v += 0.05 * rng.normal(); // nonzero biases too
    std::vector<double> in = {0.3, -1.2, 0.7};
    std::vector<double> dout = {1.0, -0.5};

    auto loss = [&](std::span<const double> params) {
        auto tape = net.make_tape();
        net.forward(params, in, tape);
        auto out = net.output(tape);
        return dout[0] * out[0] + dout[1] * out[1];
    };

    std::vector<double> grad(net.param_count(), 0.0);
    std::vector<double> dinput(3);
    auto tape = net.make_tape();
    net.forward(p, in, tape);
    net.backward(p, tape, dout, grad, dinput);

    const double h = 1e-6;
    for (std::size_t i = 0; i < p.size(); ++i) {
        std::vector<double> plus = p, minus = p;
        plus[i] += h;
        minus[i] -= h;
        double fd = (loss(plus) - loss(minus)) / (2.0 * h);
        CHECK(std::abs(fd - grad[i]) < 1e-6 * (1.0 + std::abs(fd)));
    }
    for (std::size_t i = 0; i < in.size(); ++i) {
        std::vector<double> plus = in, minus = in;
        plus[i] += h;
        minus[i] -= h;
        auto at = [&](const std::vector<double>& v) {
            auto t = net.make_tape();
            net.forward(p, v, t);
            auto out = net.output(t);
            return dout[0] * out[0] + dout[1] * out[1];
        };
        double fd = (at(plus) - at(minus)) / (2.0 * h);
        CHECK(std::abs(fd - dinput[i]) < 1e-6 * (1.0 + std::abs(fd)));
    }
}

TEST_CASE("TemporalMixerSpec forward/backward agree with finite differences") {
    TemporalMixerSpec mixer(3, 4, 2);
    Rng rng(5);
    std::vector<double> p(mixer.param_count());
    mixer.init(p, rng);
    std::vector<double> in(mixer.input_dim());
    for (double& v : in) v = rng.normal();
    std::vector<double> dout(mixer.output_dim());
    for (double& v : dout) v = rng.normal();

    auto loss = [&](std::span<const double> params, std::span<const double> input) {
        std::vector<double> out(mixer.output_dim());
        mixer.forward(params, input, out);
        double acc = 0.0;
        for (std::size_t k = 0; k < out.size(); ++k) acc += dout[k] * out[k];
        return acc;
    };

    std::vector<double> grad(mixer.param_count(), 0.0);
    std::vector<double> dinput(mixer.input_dim());
    mixer.backward(p, in, dout, grad, dinput);

    const double h = 1e-6;
    for (std::size_t i = 0; i < p.size(); ++i) {
        auto plus = p, minus = p;
        plus[i] += h;
        minus[i] -= h;
        double fd = (loss(plus, in) - loss(minus, in)) / (2.0 * h);
        CHECK(std::abs(fd - grad[i]) < 1e-7 * (1.0 + std::abs(fd)));
    }
    for (std::size_t i = 0; i < in.size(); ++i) {
        auto plus = in, minus = in;
        plus[i] += h;
        minus[i] -= h;
        double fd = (loss(p, plus) - loss(p, minus)) / (2.0 * h);
        CHECK(std::abs(fd - dinput[i]) < 1e-7 * (1.0 + std::abs(fd)));
    }
}

TEST_CASE("Adam minimizes a quadratic deterministically") {
    auto run = [] {
        std::vector<double> x = {5.0, -3.0};
        Adam adam(2, 0.05);
        for (int it = 0; it < 2000; ++it) {
            std::vector<double> g = {2.0 * (x[0] - 1.0), 2.0 * (x[1] + 2.0)};
            adam.step(x, g);
        }
        return x;
    };
    auto a = run();
    auto b = run();
    CHECK(a == b);
    CHECK(std::abs(a[0] - 1.0) < 1e-4);
    CHECK(std::abs(a[1] + 2.0) < 1e-4);
}

TEST_CASE("Standardizer produces zero mean and unit scale") {
    Matrix m(50, 3);
    Rng rng(2);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        m(i, 0) = 5.0 + 2.0 * rng.normal();
        m(i, 1) = -3.0 + 0.5 * rng.normal();
        m(i, 2) = 7.0; // constant column
    }
    auto s = Standardizer::fit(m);
    CHECK(s.scale[2] == 1.0);
    double mean0 = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) mean0 += s.apply(m.row(i))[0];
    CHECK(std::abs(mean0 / static_cast<double>(m.rows())) < 1e-12);
    CHECK(s.apply(m.row(0))[2] == 0.0);
}
