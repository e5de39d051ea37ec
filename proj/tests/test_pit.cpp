#include <doctest.h>

#include <cmath>
#include <sstream>

#include "pitcal/pit.hpp"
#include "pitcal/rng.hpp"
#include "pitcal/synthetic.hpp"
#include "support/oracles.hpp"

using namespace pitcal;

namespace {

CalibrationSet tiny_set(std::vector<double> ys) {
    Matrix x(ys.size(), 2);
    for (std::size_t i = 0; i < ys.size(); ++i) {
        x(i, 0) = static_cast<double>(i);
        x(i, 1) = -1.0;
    }
    return CalibrationSet(std::move(x), std::move(ys));
}

struct ThrowingFamily final : ConditionalFamily {
    std::unique_ptr<ScalarDistribution> at(std::span<const double> x) const override {
        if (x[0] > 1.5) throw std::runtime_error("boom");
        return std::make_unique<GaussianDistribution>(GaussianParams{0.0, 1.0});
    }
};

} // namespace

TEST_CASE("CalibrationSet validates its content") {
    CHECK_THROWS_AS(CalibrationSet(Matrix(0, 2), {}), std::invalid_argument);
    CHECK_THROWS_AS(CalibrationSet(Matrix(2, 2), {1.0}), std::invalid_argument);
    Matrix bad(1, 1);
    bad(0, 0) = std::nan("");
    CHECK_THROWS_AS(CalibrationSet(std::move(bad), {1.0}), std::invalid_argument);
}

TEST_CASE("compute_pit evaluates the base CDF rowwise") {
    ConstantFamily base(std::make_shared<GaussianDistribution>(GaussianParams{0.0, 1.0}));
    auto calib = tiny_set({0.0, 1.96});
    auto pit = compute_pit(base, calib);
    CHECK(pit.z[0] == 0.5);
    CHECK(std::abs(pit.z[1] - 0.975002104851780) < 1e-4);

    Rng rng(3);
    std::vector<double> ys;
    for (int i = 0; i < 200; ++i) ys.push_back(rng.normal() * 3.0);
    auto wide = compute_pit(base, tiny_set(std::move(ys)));
    for (double z : wide.z) {
        CHECK(z >= 0.0);
        CHECK(z <= 1.0);
    }
}

TEST_CASE("compute_pit reports the offending row") {
    ThrowingFamily family;
    auto calib = tiny_set({0.0, 0.0, 0.0});
    try {
        compute_pit(family, calib);
        FAIL("expected a throw");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    }
}

TEST_CASE("diagnostic_curve basics") {
    IdentityPitModel identity;
    std::vector<double> x{0.0};
    auto curve = diagnostic_curve(identity, x, 3);
    CHECK(curve.alphas == std::vector<double>{0.0, 0.5, 1.0});
    CHECK(curve.values == std::vector<double>{0.0, 0.5, 1.0});

    KumaraswamyPitModel squared({2.0, 1.0});
    auto c2 = diagnostic_curve(squared, x, 101);
    for (std::size_t k = 0; k < c2.alphas.size(); ++k)
        CHECK(c2.values[k] == doctest::Approx(c2.alphas[k] * c2.alphas[k]).epsilon(1e-12));
    for (std::size_t k = 1; k < c2.values.size(); ++k) CHECK(c2.values[k] >= c2.values[k - 1]);

    CHECK_THROWS_AS(diagnostic_curve(identity, x, 1), std::invalid_argument);
}

TEST_CASE("lds closed forms and invariances") {
    IdentityPitModel identity;
    std::vector<double> x{0.0};
    CHECK(lds(diagnostic_curve(identity, x, 101)) == 0.0);

    DiagnosticCurve curve;
    curve.alphas = {0.25, 0.5, 0.75};
    for (double a : curve.alphas) curve.values.push_back(a * a);
    CHECK(lds(curve) == doctest::Approx(0.044270833333333).epsilon(1e-6));

    DiagnosticCurve permuted;
    permuted.alphas = {0.75, 0.25, 0.5};
    for (double a : permuted.alphas) permuted.values.push_back(a * a);
    CHECK(lds(permuted) == doctest::Approx(lds(curve)).epsilon(1e-15));

    DiagnosticCurve spike;
    spike.alphas = {0.0, 0.5, 1.0};
    spike.values = {0.0, 0.500001, 1.0};
    CHECK(lds(spike) > 0.0);

    DiagnosticCurve empty;
    CHECK_THROWS_AS(lds(empty), std::invalid_argument);
}

TEST_CASE("curve_tag reads the failure mode off the curve shape") {
    std::vector<double> x{0.0};
    CHECK(curve_tag(diagnostic_curve(IdentityPitModel{}, x)) == "calibrated");
    CHECK(curve_tag(diagnostic_curve(KumaraswamyPitModel{{0.6, 1.0}}, x)) == "positive_bias");
    CHECK(curve_tag(diagnostic_curve(KumaraswamyPitModel{{2.0, 1.0}}, x)) == "negative_bias");
    // Mass piled near 1/2 (overdispersed base) vs mass at the endpoints.
    CHECK(curve_tag(diagnostic_curve(KumaraswamyPitModel{{3.0, 3.0}}, x)) == "overdispersion");
    CHECK(curve_tag(diagnostic_curve(KumaraswamyPitModel{{0.45, 0.45}}, x)) == "underdispersion");
}

TEST_CASE("pooled PIT is uniform when the base equals the truth") {
    SasTruthFamily truth;
    int pass = 0;
    const int seeds = 3;
    for (int s = 0; s < seeds; ++s) {
        auto data = gen_sas_dataset({5000, static_cast<std::uint64_t>(100 + s)});
        auto pit = compute_pit(truth, data);
        if (oracle::ks_uniform(pit.z) < 1.36 / std::sqrt(5000.0)) ++pass;
    }
    CHECK(pass == seeds);
}

TEST_CASE("curves serialize to alpha,g_hat csv") {
    std::ostringstream os;
    std::vector<double> x{0.0};
    write_curve_csv(os, diagnostic_curve(IdentityPitModel{}, x, 3));
    CHECK(os.str() == "alpha,g_hat\n0,0\n0.5,0.5\n1,1\n");
}

TEST_CASE("lds_batch parallel kernel matches the serial reference") {
    KumaraswamyPitModel model({2.0, 3.0});
    Matrix xs(64, 3);
    Rng rng(9);
    for (std::size_t i = 0; i < xs.rows(); ++i)
        for (std::size_t j = 0; j < xs.cols(); ++j) xs(i, j) = rng.normal();
    auto serial = lds_batch(model, xs, 101, Exec::serial);
    auto parallel = lds_batch(model, xs, 101, Exec::parallel);
    CHECK(serial == parallel);
}
