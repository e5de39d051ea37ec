#include <doctest.h>

#include <atomic>
#include <filesystem>

#include "pitcal/model_io.hpp"
#include "pitcal/nonparametric.hpp"
#include "pitcal/parallel.hpp"
#include "pitcal/parametric.hpp"
#include "pitcal/rng.hpp"

using namespace pitcal;

TEST_CASE("for_each_index covers every index under both policies") {
    for (Exec exec : {Exec::serial, Exec::parallel}) {
        std::vector<int> hits(257, 0);
        std::atomic<int> total{0};
        for_each_index(hits.size(), exec, [&](std::size_t i) {
            hits[i] += 1;
            total.fetch_add(1);
        });
        CHECK(total.load() == 257);
        for (int h : hits) CHECK(h == 1);
    }
}

TEST_CASE("for_each_index propagates exceptions from workers") {
    auto boom = [](std::size_t i) {
        if (i == 41) throw std::runtime_error("worker failure");
    };
    CHECK_THROWS_AS(for_each_index(100, Exec::serial, boom), std::runtime_error);
    CHECK_THROWS_AS(for_each_index(100, Exec::parallel, boom), std::runtime_error);
    CHECK(parallel_threads() >= 1);
}

namespace {

std::pair<CalibrationSet, PitSample> small_data(std::uint64_t seed) {
    Rng rng(seed);
    Matrix x(120, 3);
    std::vector<double> y(120);
    PitSample pit;
    pit.z.resize(120);
    for (std::size_t i = 0; i < 120; ++i) {
        for (std::size_t j = 0; j < 3; ++j) x(i, j) = rng.normal();
        pit.z[i] = rng.uniform_open01();
        y[i] = pit.z[i];
    }
    return {CalibrationSet(std::move(x), std::move(y)), std::move(pit)};
}

} // namespace

TEST_CASE("model files round-trip through the kind dispatcher") {
    auto [calib, pit] = small_data(5);
    TrainConfig pcfg;
    pcfg.seed = 1;
    pcfg.epochs = 30;
    auto parametric = fit_parametric(calib, pit, pcfg);
    TrainConfig ncfg = nonparametric_defaults(120, 2);
    ncfg.epochs = 20;
    auto nonparametric = fit_nonparametric(calib, pit, ncfg);

    auto dir = std::filesystem::temp_directory_path();
    for (const PitModel* m : {static_cast<const PitModel*>(&parametric),
                              static_cast<const PitModel*>(&nonparametric)}) {
        auto file = dir / ("model_" + m->kind() + ".json");
        save_pit_model_file(file, *m);
        auto loaded = load_pit_model_file(file);
        CHECK(loaded->kind() == m->kind());
        std::vector<double> xv{0.2, -0.4, 1.1};
        auto c1 = m->curve(xv);
        auto c2 = loaded->curve(xv);
        for (int g = 0; g <= 16; ++g) CHECK((*c1)(g / 16.0) == (*c2)(g / 16.0));
        std::filesystem::remove(file);
    }

    nlohmann::json junk;
    junk["kind"] = "mystery";
    CHECK_THROWS_AS(load_pit_model(junk), std::invalid_argument);
    IdentityPitModel identity;
    CHECK_THROWS_AS(identity.to_json(), std::logic_error);
}
