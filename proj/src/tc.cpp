#include "pitcal/tc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "pitcal/csv.hpp"
#include "pitcal/nonparametric.hpp"
#include "pitcal/parametric.hpp"
#include "pitcal/pit.hpp"
#include "pitcal/recalibrate.hpp"
#include "pitcal/rng.hpp"

namespace pitcal {

const std::vector<std::string>& tc_predictor_columns() {
    static const std::vector<std::string> cols = {
        "max_sfc_wind_kt",
        "shear_850_200_kt10",
        "shear_850_200_200to800_kt10",
        "shear_novortex_kt10",
        "rh_850_700_pct",
        "rh_700_500_pct",
        "rh_500_300_pct",
        "max_pot_intensity_kt",
        "zonal_wind_200_kt10",
        "intensity_change_kt",
        "dist_to_land_km",
        "lat_deg10",
        "lon_deg10",
        "intensity_kt",
    };
    return cols;
}

TcSchema TcSchema::standard() { return {tc_predictor_columns()}; }

std::optional<double> StormSequence::change_24h() const {
    if (!std::isfinite(intensity_history[0])) return std::nullopt;
    return intensity_history[3] - intensity_history[0];
}

std::string to_string(CategoryTag tag) {
    switch (tag) {
    case CategoryTag::TS: return "TS";
    case CategoryTag::Cat1_2: return "Cat1-2";
    case CategoryTag::Cat3_5: return "Cat3-5";
    case CategoryTag::RI: return "RI";
    case CategoryTag::RW: return "RW";
    }
    return "?";
}

std::vector<CategoryTag> categorize(const StormSequence& seq) {
    if (!std::isfinite(seq.intensity_at_t()))
        throw std::invalid_argument("categorize: intensity history missing");
    std::vector<CategoryTag> tags;
    double it = seq.intensity_at_t();
    if (it <= 63.0)
        tags.push_back(CategoryTag::TS);
    else if (it <= 95.0)
        tags.push_back(CategoryTag::Cat1_2);
    else
        tags.push_back(CategoryTag::Cat3_5);
    if (auto change = seq.change_24h()) {
        if (*change >= 30.0)
            tags.push_back(CategoryTag::RI);
        else if (*change <= -30.0)
            tags.push_back(CategoryTag::RW);
    }
    return tags;
}

ConstantFamily base_error_model(double mean_kt, double sd_kt) {
    if (!(sd_kt > 0.0)) throw std::domain_error("base_error_model: sd must be positive");
    return ConstantFamily(std::make_shared<GaussianDistribution>(GaussianParams{mean_kt, sd_kt}));
}

// ---------------------------------------------------------------------------
// Ingestion

namespace {

long long epoch_hours(int yyyymmdd, int hour) {
    using namespace std::chrono;
    year_month_day ymd{year{yyyymmdd / 10000}, month{static_cast<unsigned>((yyyymmdd / 100) % 100)},
                       day{static_cast<unsigned>(yyyymmdd % 100)}};
    if (!ymd.ok()) throw std::invalid_argument("bad date " + std::to_string(yyyymmdd));
    return static_cast<long long>(sys_days{ymd}.time_since_epoch().count()) * 24 + hour;
}

int yyyymmdd_of(std::chrono::sys_days sd) {
    std::chrono::year_month_day ymd{sd};
    return static_cast<int>(ymd.year()) * 10000 + static_cast<int>(unsigned(ymd.month())) * 100 +
           static_cast<int>(unsigned(ymd.day()));
}

int timestep_index(const std::string& label) {
    if (label == "t-12") return 0;
    if (label == "t-6") return 1;
    if (label == "t") return 2;
    return -1;
}

bool is_null(double v) { return v == kTcSentinel; }

struct RawGroup {
    std::array<bool, kTcTimesteps> seen{};
    std::array<std::array<double, kTcPredictors>, kTcTimesteps> values{};
    std::array<double, kTcTimesteps> target{};
    std::string storm_id;
    int date = 0, hour = 0, year = 0;
    std::size_t order = 0; // first-appearance order, keeps output deterministic
};

} // namespace

IngestReport ingest_sequences(const std::filesystem::path& path, const TcSchema& schema) {
    if (schema.predictor_columns.size() != kTcPredictors)
        throw std::invalid_argument("ingest_sequences: schema must name 14 predictor columns");
    std::ifstream in(path);
    if (!in) throw std::runtime_error("ingest_sequences: cannot open " + path.string());

    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("ingest_sequences: empty file " + path.string());
    auto header = csv::split_line(line);
    auto col = [&](const std::string& name) {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        return -1;
    };
    const int c_storm = col("storm_id"), c_date = col("date"), c_hour = col("hour"),
              c_step = col("timestep"), c_target = col("target_error_kt"), c_year = col("year");
    if (c_storm < 0 || c_date < 0 || c_hour < 0 || c_step < 0 || c_target < 0 || c_year < 0)
        throw std::runtime_error("ingest_sequences: header missing required columns");
    std::array<int, kTcPredictors> c_pred{};
    for (std::size_t j = 0; j < kTcPredictors; ++j) {
        c_pred[j] = col(schema.predictor_columns[j]);
        if (c_pred[j] < 0)
            throw std::runtime_error("ingest_sequences: header missing predictor column '" +
                                     schema.predictor_columns[j] + "'");
    }

    IngestReport report;
    std::map<std::tuple<std::string, int, int>, RawGroup> groups;
    std::size_t order_counter = 0;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fields = csv::split_line(line);
        try {
            if (static_cast<int>(fields.size()) <= std::max({c_storm, c_date, c_hour, c_step,
                                                             c_target, c_year}))
                throw std::invalid_argument("too few fields");
            std::string storm = fields[c_storm];
            int date = static_cast<int>(csv::parse_number(fields[c_date], "date"));
            int hour = static_cast<int>(csv::parse_number(fields[c_hour], "hour"));
            int step = timestep_index(fields[c_step]);
            if (step < 0) throw std::invalid_argument("bad timestep '" + fields[c_step] + "'");
            auto key = std::make_tuple(storm, date, hour);
            auto [it, inserted] = groups.try_emplace(key);
            RawGroup& g = it->second;
            if (inserted) {
                g.storm_id = storm;
                g.date = date;
                g.hour = hour;
                g.year = static_cast<int>(csv::parse_number(fields[c_year], "year"));
                g.order = order_counter++;
            }
            if (g.seen[step]) throw std::invalid_argument("duplicate timestep row");
            for (std::size_t j = 0; j < kTcPredictors; ++j)
                g.values[step][j] =
                    csv::parse_number(fields[c_pred[j]], schema.predictor_columns[j]);
            g.target[step] = csv::parse_number(fields[c_target], "target_error_kt");
            g.seen[step] = true;
        } catch (const std::exception& e) {
            report.malformed.push_back("line " + std::to_string(line_no) + ": " + e.what());
        }
    }

    std::vector<const RawGroup*> ordered;
    for (const auto& [key, g] : groups) {
        if (!(g.seen[0] && g.seen[1] && g.seen[2])) {
            report.malformed.push_back("sequence " + g.storm_id + "/" + std::to_string(g.date) +
                                       "h" + std::to_string(g.hour) + ": incomplete timesteps");
            continue;
        }
        ordered.push_back(&g);
    }
    std::sort(ordered.begin(), ordered.end(),
              [](const RawGroup* a, const RawGroup* b) { return a->order < b->order; });

    for (const RawGroup* gp : ordered) {
        const RawGroup& g = *gp;
        if (is_null(g.target[2])) {
            ++report.dropped_missing_target;
            continue;
        }
        StormSequence seq;
        seq.storm_id = g.storm_id;
        seq.date = g.date;
        seq.hour = g.hour;
        seq.year = g.year;
        seq.target_error = g.target[2];
        seq.predictors = Matrix(kTcTimesteps, kTcPredictors);
        bool drop = false;
        for (std::size_t j = 0; j < kTcPredictors && !drop; ++j) {
            std::array<double, kTcTimesteps> v{g.values[0][j], g.values[1][j], g.values[2][j]};
            int first = -1;
            for (std::size_t t = 0; t < kTcTimesteps; ++t)
                if (!is_null(v[t])) {
                    first = static_cast<int>(t);
                    break;
                }
            if (first < 0) {
                drop = true;
                break;
            }
            for (int t = 0; t < first; ++t) v[t] = v[first];
            for (std::size_t t = first + 1; t < kTcTimesteps; ++t)
                if (is_null(v[t])) v[t] = v[t - 1];
            for (std::size_t t = 0; t < kTcTimesteps; ++t) seq.predictors(t, j) = v[t];
        }
        if (drop) {
            ++report.dropped_all_null;
            continue;
        }
        seq.intensity_history[0] = std::numeric_limits<double>::quiet_NaN();
        for (std::size_t t = 0; t < kTcTimesteps; ++t)
            seq.intensity_history[t + 1] = seq.predictors(t, kTcPredictors - 1);
        report.sequences.push_back(std::move(seq));
    }

    // Fill the t-24 intensity by looking up the same storm 24 hours earlier.
    std::map<std::pair<std::string, long long>, double> intensity_at;
    for (const auto& s : report.sequences)
        intensity_at[{s.storm_id, epoch_hours(s.date, s.hour)}] = s.intensity_at_t();
    for (auto& s : report.sequences) {
        auto it = intensity_at.find({s.storm_id, epoch_hours(s.date, s.hour) - 24});
        if (it != intensity_at.end()) s.intensity_history[0] = it->second;
    }
    return report;
}

// ---------------------------------------------------------------------------
// Synthetic generator

namespace {

struct PredictorClimate {
    double mean, sd, lo, hi;
};

// Rough per-predictor climatologies in file units (index matches
// tc_predictor_columns; the first and the last are intensity-driven and the
// tenth is the running intensity change, all handled separately).
constexpr PredictorClimate kClimate[kTcPredictors] = {
    {0, 0, 0, 0},            // max_sfc_wind_kt (intensity + noise)
    {120, 60, 0, 500},       // shear_850_200_kt10
    {110, 55, 0, 500},       // shear_850_200_200to800_kt10
    {100, 50, 0, 500},       // shear_novortex_kt10
    {70, 10, 20, 100},       // rh_850_700_pct
    {60, 12, 15, 100},       // rh_700_500_pct
    {50, 14, 10, 100},       // rh_500_300_pct
    {120, 25, 60, 180},      // max_pot_intensity_kt
    {0, 80, -400, 400},      // zonal_wind_200_kt10
    {0, 0, 0, 0},            // intensity_change_kt (derived)
    {500, 300, 0, 2000},     // dist_to_land_km
    {250, 80, 80, 450},      // lat_deg10
    {600, 150, 200, 950},    // lon_deg10
    {0, 0, 0, 0},            // intensity_kt (path)
};

double clampd(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

} // namespace

std::string generate_tc_csv(const TcGenConfig& config) {
    if (config.storms == 0) throw std::invalid_argument("generate_tc_csv: storms must be >= 1");
    if (config.year_hi < config.year_lo)
        throw std::invalid_argument("generate_tc_csv: bad year range");

    std::ostringstream out;
    out << "storm_id,date,hour,timestep";
    for (const auto& c : tc_predictor_columns()) out << ',' << c;
    out << ",target_error_kt,year\n";

    const char* step_labels[kTcTimesteps] = {"t-12", "t-6", "t"};

    for (std::size_t s = 0; s < config.storms; ++s) {
        Rng rng = Rng::substream(config.seed, {Rng::tag("tc_storm"), s});
        int year = config.year_lo +
                   static_cast<int>(rng.below(static_cast<std::uint64_t>(config.year_hi -
                                                                         config.year_lo + 1)));
        std::size_t steps = 16 + rng.below(25); // 6-hourly samples
        char id[16];
        std::snprintf(id, sizeof(id), "AL%02zu%04d", s % 90 + 1, year);

        using namespace std::chrono;
        sys_days season_start{year_month_day{std::chrono::year{year}, month{6}, day{1}}};
        long long t0_hours =
            static_cast<long long>(season_start.time_since_epoch().count()) * 24 +
            static_cast<long long>(6 * rng.below(4)) + 24 * static_cast<long long>(rng.below(120));

        // Latent AR(1) drivers, one per climate-driven predictor.
        std::array<double, kTcPredictors> latent{};
        for (auto& v : latent) v = rng.normal();

        std::vector<std::array<double, kTcPredictors>> rows(steps);
        std::vector<double> intensity(steps);
        intensity[0] = 35.0 + rng.uniform(0.0, 25.0);
        int phase = 0; // -2..2: rw, weaken, steady, intensify, ri
        for (std::size_t k = 0; k < steps; ++k) {
            if (k > 0) {
                if (rng.uniform01() < 0.15) {
                    double u = rng.uniform01();
                    phase = u < 0.08 ? -2 : u < 0.30 ? -1 : u < 0.62 ? 0 : u < 0.92 ? 1 : 2;
                }
                double drive = 3.2 * phase;
                double shear_z = (rows[k - 1][1] - 120.0) / 60.0;
                drive -= 0.8 * shear_z;
                intensity[k] = clampd(intensity[k - 1] + drive + 1.5 * rng.normal(), 35.0, 165.0);
            }
            for (std::size_t j = 0; j < kTcPredictors; ++j) {
                latent[j] = 0.9 * latent[j] + 0.4359 * rng.normal();
                const PredictorClimate& c = kClimate[j];
                if (c.sd > 0.0) rows[k][j] = clampd(c.mean + c.sd * latent[j], c.lo, c.hi);
            }
            rows[k][0] = intensity[k] + 2.0 * rng.normal();
            rows[k][9] = k >= 4 ? intensity[k] - intensity[k - 4] : 0.0;
            rows[k][13] = intensity[k];
        }

        // Sequences need two prior steps and a t+24h (four ahead) target.
        for (std::size_t k = 2; k + 4 < steps; ++k) {
            double recent = intensity[k] - intensity[k - 2];
            double shear_z = (rows[k][1] - 120.0) / 60.0;
            double bias = 0.8 * recent - 2.0 * shear_z;
            double scale = 6.0 + 0.06 * intensity[k] + 0.08 * std::abs(recent);
            double target = bias + scale * rng.normal();
            bool target_missing = rng.uniform01() < config.target_missing_rate;

            std::array<bool, kTcPredictors> all_null{};
            for (std::size_t j = 0; j < kTcPredictors; ++j)
                all_null[j] = rng.uniform01() < config.all_null_rate;

            long long t_hours = t0_hours + 6 * static_cast<long long>(k);
            int date = yyyymmdd_of(sys_days{days{t_hours / 24}});
            int hour = static_cast<int>(t_hours % 24);

            for (std::size_t t = 0; t < kTcTimesteps; ++t) {
                const auto& r = rows[k - 2 + t];
                out << id << ',' << date << ',' << hour << ',' << step_labels[t];
                for (std::size_t j = 0; j < kTcPredictors; ++j) {
                    double v = r[j];
                    if (all_null[j] || rng.uniform01() < config.missing_rate) v = kTcSentinel;
                    out << ',' << csv::number(v);
                }
                out << ',' << (target_missing ? csv::number(kTcSentinel) : csv::number(target))
                    << ',' << year << '\n';
            }
        }
    }
    return out.str();
}

void write_tc_csv(const std::filesystem::path& path, const TcGenConfig& config) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_tc_csv: cannot open " + path.string());
    out << generate_tc_csv(config);
}

// ---------------------------------------------------------------------------
// Evaluation table

void TcEvalConfig::validate() const {
    if (calib_year_hi < calib_year_lo || test_year_hi < test_year_lo)
        throw std::invalid_argument("TcEvalConfig: bad year ranges");
    bool disjoint = calib_year_hi < test_year_lo || test_year_hi < calib_year_lo;
    if (!disjoint) throw std::invalid_argument("TcEvalConfig: eras must be disjoint");
    for (const auto& m : methods)
        if (m != "parametric" && m != "nonparametric")
            throw std::invalid_argument("TcEvalConfig: unknown method '" + m + "'");
    if (base_sd && !(*base_sd > 0.0))
        throw std::invalid_argument("TcEvalConfig: base_sd must be positive");
}

const ScoreRow* TcEvalResult::find(const std::string& category, const std::string& method,
                                   const std::string& metric) const {
    for (const auto& r : rows)
        if (r.category == category && r.method == method && r.metric == metric) return &r;
    return nullptr;
}

namespace {

std::vector<double> flatten_features(const StormSequence& seq,
                                     const std::vector<double>& pred_mean,
                                     const std::vector<double>& pred_sd) {
    std::vector<double> x(kTcTimesteps * kTcPredictors);
    for (std::size_t t = 0; t < kTcTimesteps; ++t)
        for (std::size_t j = 0; j < kTcPredictors; ++j)
            x[t * kTcPredictors + j] = (seq.predictors(t, j) - pred_mean[j]) / pred_sd[j];
    return x;
}

} // namespace

TcEvalResult evaluate_table(const std::vector<StormSequence>& data, const TcEvalConfig& config,
                            Exec exec) {
    config.validate();

    std::vector<const StormSequence*> calib, test;
    for (const auto& s : data) {
        if (s.year >= config.calib_year_lo && s.year <= config.calib_year_hi)
            calib.push_back(&s);
        else if (s.year >= config.test_year_lo && s.year <= config.test_year_hi)
            test.push_back(&s);
    }
    if (calib.size() < 2) throw std::invalid_argument("evaluate_table: calibration era too small");
    if (test.empty()) throw std::invalid_argument("evaluate_table: empty test era");

    {
        std::set<std::string> calib_ids;
        for (const auto* s : calib) calib_ids.insert(s->storm_id);
        for (const auto* s : test)
            if (calib_ids.count(s->storm_id))
                throw std::logic_error("evaluate_table: storm " + s->storm_id +
                                       " appears in both eras");
    }

    // Base error model: configurable mean, SD from the calibration era unless
    // overridden.
    double sd = 0.0;
    if (config.base_sd) {
        sd = *config.base_sd;
    } else {
        double m = 0.0;
        for (const auto* s : calib) m += s->target_error;
        m /= static_cast<double>(calib.size());
        double acc = 0.0;
        for (const auto* s : calib) {
            double d = s->target_error - m;
            acc += d * d;
        }
        sd = std::sqrt(acc / static_cast<double>(calib.size() - 1));
        if (!(sd > 0.0)) throw std::runtime_error("evaluate_table: degenerate calibration errors");
    }
    auto base_dist = std::make_shared<GaussianDistribution>(GaussianParams{config.base_mean, sd});

    // Per-predictor standardization over calibration-era cells.
    std::vector<double> pred_mean(kTcPredictors, 0.0), pred_sd(kTcPredictors, 1.0);
    for (std::size_t j = 0; j < kTcPredictors; ++j) {
        double m = 0.0;
        for (const auto* s : calib)
            for (std::size_t t = 0; t < kTcTimesteps; ++t) m += s->predictors(t, j);
        m /= static_cast<double>(calib.size() * kTcTimesteps);
        double var = 0.0;
        for (const auto* s : calib)
            for (std::size_t t = 0; t < kTcTimesteps; ++t) {
                double d = s->predictors(t, j) - m;
                var += d * d;
            }
        var /= static_cast<double>(calib.size() * kTcTimesteps);
        pred_mean[j] = m;
        pred_sd[j] = var > 1e-24 ? std::sqrt(var) : 1.0;
    }

    Matrix x_calib(calib.size(), kTcTimesteps * kTcPredictors);
    std::vector<double> eps_calib(calib.size());
    for (std::size_t i = 0; i < calib.size(); ++i) {
        auto x = flatten_features(*calib[i], pred_mean, pred_sd);
        std::copy(x.begin(), x.end(), x_calib.row(i).begin());
        eps_calib[i] = calib[i]->target_error;
    }
    CalibrationSet calib_set(std::move(x_calib), std::move(eps_calib));

    PitSample pit;
    pit.z.resize(calib_set.size());
    for (std::size_t i = 0; i < calib_set.size(); ++i)
        pit.z[i] = base_dist->cdf(calib_set.y(i));

    std::vector<std::pair<std::string, std::shared_ptr<const PitModel>>> models;
    for (const auto& method : config.methods) {
        if (method == "parametric") {
            TrainConfig cfg = config.parametric_config;
            cfg.mixer_steps = kTcTimesteps;
            if (cfg.mixer_filters == 0) cfg.mixer_filters = 3;
            cfg.seed = mix64(config.seed ^ Rng::tag("tc_parametric"));
            models.emplace_back(method, std::make_shared<ParametricPitModel>(
                                            fit_parametric(calib_set, pit, cfg)));
        } else {
            TrainConfig cfg = config.nonparametric_config
                                  ? *config.nonparametric_config
                                  : nonparametric_defaults(calib_set.size(), 0);
            cfg.seed = mix64(config.seed ^ Rng::tag("tc_nonparametric"));
            models.emplace_back(method, std::make_shared<MonotoneNet>(
                                            fit_nonparametric(calib_set, pit, cfg)));
        }
    }

    // Per-sequence scores for the base and every method.
    const std::size_t n_test = test.size();
    std::vector<double> truths(n_test);
    for (std::size_t i = 0; i < n_test; ++i) truths[i] = test[i]->target_error;

    ScoreConfig crps_cfg;
    crps_cfg.grid_size = config.crps_grid;

    struct MethodScores {
        std::string name;
        std::vector<double> crps_values;
        std::vector<double> mean_values;
    };
    std::vector<MethodScores> scored;

    {
        MethodScores base_scores;
        base_scores.name = "base";
        base_scores.crps_values.resize(n_test);
        base_scores.mean_values.assign(n_test, base_dist->mean());
        for_each_index(n_test, exec, [&](std::size_t i) {
            base_scores.crps_values[i] = crps(*base_dist, truths[i], crps_cfg);
        });
        scored.push_back(std::move(base_scores));
    }
    for (const auto& [name, model] : models) {
        MethodScores ms;
        ms.name = name;
        ms.crps_values.resize(n_test);
        ms.mean_values.resize(n_test);
        for_each_index(n_test, exec, [&](std::size_t i) {
            RecalibratedDistribution rd(base_dist, model,
                                        flatten_features(*test[i], pred_mean, pred_sd));
            ms.crps_values[i] = crps(rd, truths[i], crps_cfg);
            ms.mean_values[i] = rd.mean();
        });
        scored.push_back(std::move(ms));
    }

    // Category index lists.
    const std::vector<std::string> category_names = {"Overall", "TS", "Cat1-2",
                                                     "Cat3-5",  "RI", "RW"};
    std::map<std::string, std::vector<std::size_t>> members;
    for (const auto& c : category_names) members[c] = {};
    for (std::size_t i = 0; i < n_test; ++i) {
        members["Overall"].push_back(i);
        for (CategoryTag tag : categorize(*test[i])) members[to_string(tag)].push_back(i);
    }

    TcEvalResult result;
    result.calib_count = calib.size();
    result.test_count = n_test;
    result.base_sd = sd;
    for (const auto& c : category_names)
        result.test_category_counts[c] = members[c].size();

    auto category_metrics = [&](const MethodScores& ms, const std::vector<std::size_t>& idx)
        -> std::pair<std::optional<double>, std::optional<double>> {
        if (idx.empty()) return {std::nullopt, std::nullopt};
        double crps_sum = 0.0, rmse_acc = 0.0;
        for (std::size_t i : idx) {
            crps_sum += ms.crps_values[i];
            double d = ms.mean_values[i] - truths[i];
            rmse_acc += d * d;
        }
        double n = static_cast<double>(idx.size());
        return {crps_sum / n * 100.0, std::sqrt(rmse_acc / n)};
    };

    for (const auto& category : category_names) {
        const auto& idx = members[category];
        auto [base_crps, base_rmse] = category_metrics(scored.front(), idx);
        for (const auto& ms : scored) {
            auto [c, r] = category_metrics(ms, idx);
            ScoreRow crps_row{category, ms.name, "crps", c, std::nullopt};
            ScoreRow rmse_row{category, ms.name, "rmse", r, std::nullopt};
            if (ms.name != "base" && c && base_crps)
                crps_row.pct_change_vs_base = percent_change(*base_crps, *c);
            if (ms.name != "base" && r && base_rmse)
                rmse_row.pct_change_vs_base = percent_change(*base_rmse, *r);
            result.rows.push_back(std::move(crps_row));
            result.rows.push_back(std::move(rmse_row));
        }
    }
    return result;
}

} // namespace pitcal
