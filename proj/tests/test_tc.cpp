#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "pitcal/pit.hpp"
#include "pitcal/tc.hpp"

using namespace pitcal;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& content) {
    auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path;
}

std::string tc_header() {
    std::string h = "storm_id,date,hour,timestep";
    for (const auto& c : tc_predictor_columns()) h += "," + c;
    return h + ",target_error_kt,year";
}

// One sequence; the shear value at each timestep is taken from `shear` and
// the intensity from `intensity`.
std::string rows_for(const std::string& storm, int date, int hour,
                     const std::array<double, 3>& shear, const std::array<double, 3>& intensity,
                     double target, int year) {
    const char* labels[3] = {"t-12", "t-6", "t"};
    std::string out;
    for (int t = 0; t < 3; ++t) {
        out += storm + "," + std::to_string(date) + "," + std::to_string(hour) + "," + labels[t];
        out += ",50";                          // max_sfc_wind_kt
        out += "," + std::to_string(shear[t]); // shear_850_200_kt10
        for (int j = 2; j < 13; ++j) out += ",10";
        out += "," + std::to_string(intensity[t]); // intensity_kt
        out += "," + std::to_string(target) + "," + std::to_string(year) + "\n";
    }
    return out;
}

} // namespace

TEST_CASE("ingest applies the null rules exactly") {
    std::string csv = tc_header() + "\n";
    // Sequence 1: shear null at every timestep -> dropped.
    csv += rows_for("AL011999", 19990801, 0, {9999, 9999, 9999}, {40, 45, 50}, 2.5, 1999);
    // Sequence 2: shear null only at t-6 -> copied from t-12.
    csv += rows_for("AL021999", 19990802, 6, {120, 9999, 140}, {40, 45, 50}, -1.0, 1999);
    // Sequence 3: missing target -> dropped.
    csv += rows_for("AL031999", 19990803, 12, {100, 100, 100}, {40, 45, 50}, 9999, 1999);
    // Sequence 4: leading null backfilled from the first finite value.
    csv += rows_for("AL041999", 19990804, 18, {9999, 110, 130}, {40, 45, 50}, 1.0, 1999);
    auto path = write_temp("tc_rules.csv", csv);

    auto report = ingest_sequences(path);
    CHECK(report.dropped_all_null == 1);
    CHECK(report.dropped_missing_target == 1);
    CHECK(report.malformed.empty());
    REQUIRE(report.sequences.size() == 2);

    const auto& forward = report.sequences[0];
    CHECK(forward.storm_id == "AL021999");
    CHECK(forward.predictors(0, 1) == 120.0);
    CHECK(forward.predictors(1, 1) == 120.0); // forward filled
    CHECK(forward.predictors(2, 1) == 140.0);

    const auto& lead = report.sequences[1];
    CHECK(lead.predictors(0, 1) == 110.0); // backfilled
    CHECK(lead.predictors(1, 1) == 110.0);
    CHECK(lead.predictors(2, 1) == 130.0);
    CHECK(lead.intensity_at_t() == 50.0);
    CHECK_FALSE(lead.change_24h().has_value());
    std::filesystem::remove(path);
}

TEST_CASE("ingest links the same storm 24 hours back") {
    std::string csv = tc_header() + "\n";
    csv += rows_for("AL052000", 20000901, 12, {100, 100, 100}, {40, 42, 45}, 0.5, 2000);
    csv += rows_for("AL052000", 20000902, 12, {100, 100, 100}, {60, 70, 80}, 0.5, 2000);
    auto path = write_temp("tc_link.csv", csv);
    auto report = ingest_sequences(path);
    REQUIRE(report.sequences.size() == 2);
    CHECK_FALSE(report.sequences[0].change_24h().has_value());
    REQUIRE(report.sequences[1].change_24h().has_value());
    // 80 kt now vs 45 kt a day earlier.
    CHECK(*report.sequences[1].change_24h() == doctest::Approx(35.0));
    std::filesystem::remove(path);
}

TEST_CASE("malformed rows are reported with line numbers") {
    std::string csv = tc_header() + "\n";
    csv += rows_for("AL062001", 20010810, 0, {100, 100, 100}, {40, 45, 50}, 1.0, 2001);
    csv += "AL072001,20010811,0,t-12,not_a_number\n";
    auto path = write_temp("tc_malformed.csv", csv);
    auto report = ingest_sequences(path);
    CHECK(report.sequences.size() == 1);
    REQUIRE(report.malformed.size() >= 1);
    CHECK(report.malformed[0].find("line 5") != std::string::npos);
    std::filesystem::remove(path);
}

TEST_CASE("generator fixture ingests deterministically with 3x14 shapes") {
    TcGenConfig cfg;
    cfg.storms = 4;
    cfg.seed = 9;
    std::string csv1 = generate_tc_csv(cfg);
    std::string csv2 = generate_tc_csv(cfg);
    CHECK(csv1 == csv2);
    auto path = write_temp("tc_fixture.csv", csv1);
    auto report = ingest_sequences(path);
    CHECK(report.sequences.size() > 10);
    for (const auto& s : report.sequences) {
        CHECK(s.predictors.rows() == kTcTimesteps);
        CHECK(s.predictors.cols() == kTcPredictors);
        for (std::size_t t = 0; t < kTcTimesteps; ++t)
            for (std::size_t j = 0; j < kTcPredictors; ++j)
                CHECK(std::isfinite(s.predictors(t, j)));
    }
    // Deterministic category counts.
    std::map<std::string, int> counts;
    for (const auto& s : report.sequences)
        for (auto tag : categorize(s)) counts[to_string(tag)]++;
    auto report2 = ingest_sequences(path);
    std::map<std::string, int> counts2;
    for (const auto& s : report2.sequences)
        for (auto tag : categorize(s)) counts2[to_string(tag)]++;
    CHECK(counts == counts2);
    std::filesystem::remove(path);
}

TEST_CASE("categorize thresholds") {
    StormSequence seq;
    seq.predictors = Matrix(3, 14);
    auto with = [&](double intensity, double back24) {
        StormSequence s = seq;
        s.intensity_history = {back24, intensity - 2, intensity - 1, intensity};
        return s;
    };
    auto tags = [&](const StormSequence& s) {
        std::vector<std::string> out;
        for (auto t : categorize(s)) out.push_back(to_string(t));
        return out;
    };

    CHECK(tags(with(50.0, 45.0)) == std::vector<std::string>{"TS"});
    CHECK(tags(with(63.0, 60.0)) == std::vector<std::string>{"TS"});
    CHECK(tags(with(64.0, 60.0)) == std::vector<std::string>{"Cat1-2"});
    CHECK(tags(with(95.0, 90.0)) == std::vector<std::string>{"Cat1-2"});
    CHECK(tags(with(96.0, 90.0)) == std::vector<std::string>{"Cat3-5"});
    // 24-hour change +35 -> RI; -30 -> RW.
    CHECK(tags(with(85.0, 50.0)) == std::vector<std::string>{"Cat1-2", "RI"});
    CHECK(tags(with(80.0, 50.0)) == std::vector<std::string>{"Cat1-2", "RI"});
    CHECK(tags(with(50.0, 80.0)) == std::vector<std::string>{"TS", "RW"});
    CHECK(tags(with(50.0, 75.0)) == std::vector<std::string>{"TS"});
    // Unknown 24h-back intensity: never RI/RW.
    StormSequence nohist = with(90.0, 0.0);
    nohist.intensity_history[0] = std::numeric_limits<double>::quiet_NaN();
    CHECK(tags(nohist) == std::vector<std::string>{"Cat1-2"});
}

TEST_CASE("base_error_model basics") {
    auto family = base_error_model(0.0, 10.0);
    std::vector<double> x{1.0};
    CHECK(family.at(x)->cdf(0.0) == 0.5);
    Matrix fx(1, 1);
    CalibrationSet calib(std::move(fx), {0.0});
    auto pit = compute_pit(family, calib);
    CHECK(pit.z[0] == 0.5);
    CHECK_THROWS_AS(base_error_model(0.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(base_error_model(0.0, -2.0), std::domain_error);
}

TEST_CASE("evaluate_table end to end on a synthetic fixture") {
    TcGenConfig gen;
    gen.storms = 26;
    gen.seed = 31;
    auto path = write_temp("tc_eval.csv", generate_tc_csv(gen));
    auto report = ingest_sequences(path);
    std::filesystem::remove(path);
    REQUIRE(report.sequences.size() > 150);

    TcEvalConfig cfg;
    cfg.calib_year_lo = 2000;
    cfg.calib_year_hi = 2015;
    cfg.test_year_lo = 2016;
    cfg.test_year_hi = 2022;
    cfg.methods = {"parametric"};
    cfg.base_mean = 5.0; // injected base bias
    cfg.seed = 4;
    cfg.parametric_config.epochs = 150;
    auto result = evaluate_table(report.sequences, cfg, Exec::parallel);

    // sigma default: sample SD of calibration-era target errors.
    {
        std::vector<double> errs;
        for (const auto& s : report.sequences)
            if (s.year >= 2000 && s.year <= 2015) errs.push_back(s.target_error);
        double m = 0.0;
        for (double e : errs) m += e;
        m /= static_cast<double>(errs.size());
        double v = 0.0;
        for (double e : errs) v += (e - m) * (e - m);
        double sd = std::sqrt(v / static_cast<double>(errs.size() - 1));
        CHECK(std::abs(result.base_sd - sd) < 1e-9);
    }

    // Row schema: 6 categories x 2 methods (base + parametric) x 2 metrics.
    const std::vector<std::string> cats{"Overall", "TS", "Cat1-2", "Cat3-5", "RI", "RW"};
    CHECK(result.rows.size() == cats.size() * 2 * 2);
    for (const auto& cat : cats) {
        CHECK(result.find(cat, "base", "crps") != nullptr);
        CHECK(result.find(cat, "base", "rmse") != nullptr);
        CHECK(result.find(cat, "parametric", "crps") != nullptr);
        CHECK(result.find(cat, "parametric", "rmse") != nullptr);
    }

    // The biased base is beaten overall on RMSE, and the percent change is
    // consistent with the stored values.
    const auto* base_rmse = result.find("Overall", "base", "rmse");
    const auto* par_rmse = result.find("Overall", "parametric", "rmse");
    REQUIRE(base_rmse->value.has_value());
    REQUIRE(par_rmse->value.has_value());
    CHECK(*par_rmse->value < *base_rmse->value);
    CHECK(*par_rmse->pct_change_vs_base ==
          doctest::Approx(percent_change(*base_rmse->value, *par_rmse->value)));

    // Era split is leak-free by construction.
    std::set<std::string> calib_ids, test_ids;
    for (const auto& s : report.sequences) {
        if (s.year <= 2015) calib_ids.insert(s.storm_id);
        if (s.year >= 2016) test_ids.insert(s.storm_id);
    }
    for (const auto& id : test_ids) CHECK(calib_ids.count(id) == 0);
}

TEST_CASE("evaluate_table rejects overlapping eras") {
    TcEvalConfig cfg;
    cfg.calib_year_lo = 2000;
    cfg.calib_year_hi = 2016;
    cfg.test_year_lo = 2016;
    cfg.test_year_hi = 2022;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
