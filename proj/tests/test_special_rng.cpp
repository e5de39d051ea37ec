#include <doctest.h>

#include <cmath>

#include "pitcal/rng.hpp"
#include "pitcal/special.hpp"
#include "support/oracles.hpp"

using namespace pitcal;

TEST_CASE("std_normal_cdf matches quadrature oracle") {
    for (double x : {-6.0, -3.5, -1.0, -0.1, 0.0, 0.3, 1.0, 1.96, 2.5, 4.0, 7.0}) {
        CHECK(std::abs(std_normal_cdf(x) - oracle::normal_cdf_quadrature(x)) < 1e-13);
    }
    CHECK(std_normal_cdf(0.0) == 0.5);
    // Reference value 0.975002104851780 (high-precision error-function oracle).
    CHECK(std::abs(std_normal_cdf(1.96) - 0.975002104851780) < 1e-12);
}

TEST_CASE("std_normal_quantile inverts the CDF to high accuracy") {
    // Beyond |x| ~ 5.5 the tail mass of 1-u is no longer representable in a
    // double, so the roundtrip through u cannot be tighter than eps/phi(x).
    for (double x : {-5.0, -2.0, -0.5, 0.0, 0.3, 1.0, 3.0, 5.0}) {
        double u = std_normal_cdf(x);
        CHECK(std::abs(std_normal_quantile(u) - x) < 1e-10);
    }
    for (double u : {1e-12, 1e-6, 0.025, 0.5, 0.975, 1.0 - 1e-6}) {
        double x = std_normal_quantile(u);
        CHECK(std::abs(std_normal_cdf(x) - u) < 1e-14);
    }
    CHECK_THROWS_AS(std_normal_quantile(0.0), std::domain_error);
    CHECK_THROWS_AS(std_normal_quantile(1.0), std::domain_error);
    CHECK_THROWS_AS(std_normal_quantile(-0.5), std::domain_error);
}

TEST_CASE("softplus and sigmoid behave at extremes") {
    CHECK(softplus(0.0) == doctest::Approx(std::log(2.0)));
    CHECK(softplus(100.0) == doctest::Approx(100.0));
    CHECK(softplus(-100.0) == doctest::Approx(0.0).epsilon(1e-30));
    CHECK(sigmoid(0.0) == 0.5);
    CHECK(sigmoid(40.0) == doctest::Approx(1.0));
    CHECK(sigmoid(-40.0) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("rng substreams are deterministic and distinct") {
    Rng a = Rng::substream(7, {Rng::tag("alpha"), 3});
    Rng a2 = Rng::substream(7, {Rng::tag("alpha"), 3});
    Rng b = Rng::substream(7, {Rng::tag("alpha"), 4});
    bool identical = true, differs = false;
    for (int i = 0; i < 64; ++i) {
        auto va = a.next_u64();
        identical = identical && (va == a2.next_u64());
        differs = differs || (va != b.next_u64());
    }
    CHECK(identical);
    CHECK(differs);
}

TEST_CASE("rng variates live in their ranges") {
    Rng rng(42);
    double mean = 0.0;
    for (int i = 0; i < 20000; ++i) {
        double u = rng.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        double v = rng.uniform_open01();
        CHECK(v > 0.0);
        CHECK(v < 1.0);
        mean += rng.normal();
    }
    mean /= 20000.0;
    CHECK(std::abs(mean) < 0.03);
}
