#include <doctest.h>

#include <cmath>
#include <sstream>

#include "pitcal/rng.hpp"
#include "pitcal/scoring.hpp"
#include "pitcal/synthetic.hpp"
#include "support/oracles.hpp"

using namespace pitcal;

TEST_CASE("gen_sas_dataset draws inside the box, reproducibly") {
    auto data = gen_sas_dataset({2000, 77});
    for (std::size_t i = 0; i < data.size(); ++i) {
        CHECK(data.features(i, 0) >= -2.0);
        CHECK(data.features(i, 0) <= 2.0);
        CHECK(data.features(i, 1) > 0.0);
        CHECK(data.features(i, 1) <= 2.0);
        CHECK(data.features(i, 2) >= -2.0);
        CHECK(data.features(i, 2) <= 2.0);
        CHECK(data.features(i, 3) > 0.0);
        CHECK(data.features(i, 3) <= 2.0);
    }
    auto again = gen_sas_dataset({2000, 77});
    CHECK(data.features == again.features);
    CHECK(data.responses == again.responses);
    auto other = gen_sas_dataset({2000, 78});
    CHECK(data.responses != other.responses);
}

TEST_CASE("sampling at the standard-normal corner has mean zero") {
    // x = (0,1,0,1) makes the SAS law standard normal; draw via the family.
    SasTruthFamily family;
    std::vector<double> x{0.0, 1.0, 0.0, 1.0};
    auto dist = family.at(x);
    Rng rng(123);
    double mean = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) mean += dist->quantile(rng.uniform_open01());
    mean /= n;
    CHECK(std::abs(mean) < 0.05);
}

TEST_CASE("true_pit_cdf analytic values") {
    std::vector<double> corner{0.0, 1.0, 0.0, 1.0};
    for (double a : {0.0, 0.2, 0.5, 0.77, 1.0})
        CHECK(true_pit_cdf(a, corner) == doctest::Approx(a).epsilon(1e-12));

    Rng rng(9);
    for (int k = 0; k < 5; ++k) {
        std::vector<double> x{rng.uniform(-2.0, 2.0), 2.0 * (1.0 - rng.uniform01()),
                              rng.uniform(-2.0, 2.0), 2.0 * (1.0 - rng.uniform01())};
        SasDistribution truth(sas_params_from(x));
        CHECK(true_pit_cdf(0.5, x) == doctest::Approx(truth.cdf(0.0)).epsilon(1e-12));
        CHECK(true_pit_cdf(0.0, x) == 0.0);
        CHECK(true_pit_cdf(1.0, x) == 1.0);
    }
}

TEST_CASE("analytic PIT-CDF matches simulated PIT values") {
    std::vector<double> x{0.8, 1.3, -0.9, 1.1};
    SasDistribution truth(sas_params_from(x));
    GaussianDistribution base({0.0, 1.0});
    Rng rng(31);
    std::vector<double> z(100000);
    for (auto& v : z) v = base.cdf(truth.quantile(rng.uniform_open01()));
    double ks = oracle::ks_against(std::move(z), [&](double a) { return true_pit_cdf(a, x); });
    CHECK(ks < 0.01);
}

TEST_CASE("oracle curve density differentiates the oracle map") {
    SasOraclePitModel model;
    std::vector<double> x{0.5, 1.0, 1.5, 1.0};
    auto curve = model.curve(x);
    CHECK(curve->has_density());
    for (double a : {0.1, 0.35, 0.6, 0.9}) {
        double h = 1e-6;
        double fd = ((*curve)(a + h) - (*curve)(a - h)) / (2.0 * h);
        CHECK(std::abs(fd - curve->density(a)) / (std::abs(fd) + 1e-12) < 1e-4);
    }
}

TEST_CASE("convergence experiment smoke run") {
    ConvergenceSpec spec;
    spec.n_grid = {5, 10};
    spec.replicates = 2;
    spec.seed = 5;
    spec.parametric_config.epochs = 40;
    auto result = convergence_experiment(spec, Exec::serial);
    // 3 methods x 2 N x 2 replicates x 2 test points.
    CHECK(result.cells.size() == 24);
    for (const auto& c : result.cells) {
        CHECK_FALSE(c.failed);
        if (c.method == "true") CHECK(c.ise == 0.0);
        CHECK(c.ise >= 0.0);
    }
    CHECK(result.mean_ise("true", 5, 0) == 0.0);
    auto summary = result.summary();
    CHECK(summary.size() == 6);

    // Cells use independent streams, so the parallel run is bitwise equal.
    auto par = convergence_experiment(spec, Exec::parallel);
    REQUIRE(par.cells.size() == result.cells.size());
    for (std::size_t i = 0; i < par.cells.size(); ++i) {
        CHECK(par.cells[i].ise == result.cells[i].ise);
        CHECK(par.cells[i].method == result.cells[i].method);
    }

    std::ostringstream detail, summary_csv;
    write_convergence_csv(detail, result);
    CHECK(detail.str().substr(0, 33) == "method,N,replicate,test_point,ise");
    write_convergence_summary_csv(summary_csv, result);
    CHECK(summary_csv.str().substr(0, 16) == "method,N,mean,sd");
}

TEST_CASE("convergence spec validation") {
    ConvergenceSpec spec;
    spec.replicates = 1;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec.replicates = 2;
    spec.n_grid = {50, 10};
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec.n_grid = {10, 50};
    spec.methods = {"magic"};
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

TEST_CASE("pca projection is centered, orthonormal and variance-ordered") {
    auto data = gen_sas_dataset({300, 11});
    IdentityPitModel identity;
    auto map = pca2_lds_map(data, identity, 51, Exec::serial);
    REQUIRE(map.components == 2);
    CHECK_FALSE(map.rank_deficient);

    for (std::size_t k = 0; k < 2; ++k) {
        double mean = 0.0;
        for (std::size_t i = 0; i < map.coords.rows(); ++i) mean += map.coords(i, k);
        CHECK(std::abs(mean / static_cast<double>(map.coords.rows())) < 1e-10);
    }
    double n11 = 0.0, n22 = 0.0, dot = 0.0;
    for (std::size_t j = 0; j < 4; ++j) {
        n11 += map.directions(0, j) * map.directions(0, j);
        n22 += map.directions(1, j) * map.directions(1, j);
        dot += map.directions(0, j) * map.directions(1, j);
    }
    CHECK(std::abs(n11 - 1.0) < 1e-8);
    CHECK(std::abs(n22 - 1.0) < 1e-8);
    CHECK(std::abs(dot) < 1e-8);

    double var1 = 0.0, var2 = 0.0;
    for (std::size_t i = 0; i < map.coords.rows(); ++i) {
        var1 += map.coords(i, 0) * map.coords(i, 0);
        var2 += map.coords(i, 1) * map.coords(i, 1);
    }
    CHECK(var1 >= var2);
    for (double v : map.lds) CHECK(v == 0.0); // identity map everywhere

    // Serial and parallel LDS agree bitwise.
    auto par = pca2_lds_map(data, identity, 51, Exec::parallel);
    CHECK(par.lds == map.lds);
}

TEST_CASE("rank-deficient data yields fewer components and a flag") {
    Matrix x(40, 3);
    Rng rng(3);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        x(i, 0) = rng.normal();
        x(i, 1) = 2.0 * x(i, 0); // collinear
        x(i, 2) = 7.0;           // constant
    }
    std::vector<double> y(40, 0.5);
    CalibrationSet data(std::move(x), std::move(y));
    auto map = pca2_lds_map(data, IdentityPitModel{}, 11, Exec::serial);
    CHECK(map.components == 1);
    CHECK(map.rank_deficient);
}
