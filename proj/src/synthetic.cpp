#include "pitcal/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "pitcal/csv.hpp"
#include "pitcal/nonparametric.hpp"
#include "pitcal/parametric.hpp"
#include "pitcal/rng.hpp"
#include "pitcal/scoring.hpp"
#include "pitcal/special.hpp"

namespace pitcal {

SasParams sas_params_from(std::span<const double> x) {
    if (x.size() != kSasDim)
        throw std::invalid_argument("sas_params_from: expected 4 covariates");
    return {x[0], x[1], x[2], x[3]};
}

CalibrationSet gen_sas_dataset(const SasDesign& design) {
    if (design.n == 0) throw std::invalid_argument("gen_sas_dataset: n must be >= 1");
    Rng rng = Rng::substream(design.seed, {Rng::tag("sas_dataset")});
    Matrix x(design.n, kSasDim);
    std::vector<double> y(design.n);
    for (std::size_t i = 0; i < design.n; ++i) {
        x(i, 0) = rng.uniform(-2.0, 2.0);
        x(i, 1) = 2.0 * (1.0 - rng.uniform01()); // (0, 2]
        x(i, 2) = rng.uniform(-2.0, 2.0);
        x(i, 3) = 2.0 * (1.0 - rng.uniform01());
        SasDistribution truth(sas_params_from(x.row(i)));
        // Tiny tail-weight parameters produce draws beyond double range.
        // Clamping keeps responses representable without changing any PIT
        // value (the normal CDF saturates around |y| ~ 39).
        y[i] = std::clamp(truth.quantile(rng.uniform_open01()), -1e15, 1e15);
    }
    return CalibrationSet(std::move(x), std::move(y));
}

std::unique_ptr<ScalarDistribution> SasTruthFamily::at(std::span<const double> x) const {
    return std::make_unique<SasDistribution>(sas_params_from(x));
}

double true_pit_cdf(double alpha, std::span<const double> x) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::domain_error("true_pit_cdf: alpha outside [0,1]");
    if (alpha == 0.0) return 0.0;
    if (alpha == 1.0) return 1.0;
    SasDistribution truth(sas_params_from(x));
    return truth.cdf(std_normal_quantile(alpha));
}

namespace {

class SasOracleCurve final : public PitCurve {
public:
    explicit SasOracleCurve(SasParams p) : truth_(p) {}

    double operator()(double alpha) const override {
        if (!(alpha >= 0.0 && alpha <= 1.0))
            throw std::domain_error("SasOracleCurve: alpha outside [0,1]");
        if (alpha == 0.0) return 0.0;
        if (alpha == 1.0) return 1.0;
        return truth_.cdf(std_normal_quantile(alpha));
    }

    bool has_density() const override { return true; }

    double density(double alpha) const override {
        // d/dalpha F(Phi^{-1}(alpha)) = f(Phi^{-1}(alpha)) / phi(Phi^{-1}(alpha))
        double a = std::min(std::max(alpha, 1e-12), 1.0 - 1e-12);
        double q = std_normal_quantile(a);
        return truth_.pdf(q) / std_normal_pdf(q);
    }

private:
    SasDistribution truth_;
};

} // namespace

std::unique_ptr<PitCurve> SasOraclePitModel::curve(std::span<const double> x) const {
    return std::make_unique<SasOracleCurve>(sas_params_from(x));
}

Matrix default_test_points() {
    // D: strong positive skewness; E: its mirrored negative-skew twin.
    return Matrix::from_rows({{0.5, 1.0, 1.5, 1.0}, {-0.5, 1.0, -1.5, 1.0}});
}

void ConvergenceSpec::validate() const {
    if (replicates < 2) throw std::invalid_argument("ConvergenceSpec: replicates must be >= 2");
    if (n_grid.empty() || !std::is_sorted(n_grid.begin(), n_grid.end()))
        throw std::invalid_argument("ConvergenceSpec: n_grid must be non-empty and sorted");
    for (std::size_t n : n_grid)
        if (n < 2) throw std::invalid_argument("ConvergenceSpec: n must be >= 2");
    if (test_points.rows() == 0 || test_points.cols() != kSasDim)
        throw std::invalid_argument("ConvergenceSpec: test points must be rows of dimension 4");
    if (methods.empty()) throw std::invalid_argument("ConvergenceSpec: no methods");
    for (const auto& m : methods)
        if (m != "parametric" && m != "nonparametric" && m != "true")
            throw std::invalid_argument("ConvergenceSpec: unknown method '" + m + "'");
}

double ConvergenceResult::mean_ise(const std::string& method, std::size_t n,
                                   std::size_t test_point) const {
    double acc = 0.0;
    std::size_t count = 0;
    for (const auto& c : cells) {
        if (c.failed || c.method != method || c.n != n || c.test_point != test_point) continue;
        acc += c.ise;
        ++count;
    }
    if (count == 0) throw std::runtime_error("ConvergenceResult::mean_ise: empty cell group");
    return acc / static_cast<double>(count);
}

std::vector<ConvergenceResult::SummaryRow> ConvergenceResult::summary() const {
    std::vector<SummaryRow> rows;
    for (const auto& c : cells) {
        if (c.failed) continue;
        auto it = std::find_if(rows.begin(), rows.end(), [&](const SummaryRow& r) {
            return r.method == c.method && r.n == c.n;
        });
        if (it == rows.end()) rows.push_back({c.method, c.n, 0.0, 0.0});
    }
    for (auto& r : rows) {
        double sum = 0.0, sum2 = 0.0;
        std::size_t count = 0;
        for (const auto& c : cells) {
            if (c.failed || c.method != r.method || c.n != r.n) continue;
            sum += c.ise;
            sum2 += c.ise * c.ise;
            ++count;
        }
        r.mean = sum / static_cast<double>(count);
        r.sd = count > 1
                   ? std::sqrt(std::max(0.0, (sum2 - sum * sum / static_cast<double>(count)) /
                                                 static_cast<double>(count - 1)))
                   : 0.0;
    }
    return rows;
}

ConvergenceResult convergence_experiment(const ConvergenceSpec& spec, Exec exec) {
    spec.validate();
    struct CellKey {
        std::string method;
        std::size_t n, replicate;
    };
    std::vector<CellKey> keys;
    for (const auto& method : spec.methods)
        for (std::size_t n : spec.n_grid)
            for (std::size_t b = 0; b < spec.replicates; ++b) keys.push_back({method, n, b});

    const std::size_t n_points = spec.test_points.rows();
    ConvergenceResult result;
    result.cells.resize(keys.size() * n_points);

    GaussianDistribution base({0.0, 1.0});
    SasOraclePitModel oracle;

    for_each_index(keys.size(), exec, [&](std::size_t ki) {
        const CellKey& key = keys[ki];
        std::uint64_t cell_seed = mix64(mix64(mix64(spec.seed ^ Rng::tag(key.method)) ^
                                              static_cast<std::uint64_t>(key.n)) ^
                                        static_cast<std::uint64_t>(key.replicate));
        ConvergenceCell proto;
        proto.method = key.method;
        proto.n = key.n;
        proto.replicate = key.replicate;
        std::unique_ptr<PitModel> fitted;
        try {
            if (key.method != "true") {
                CalibrationSet data = gen_sas_dataset({key.n, cell_seed});
                PitSample pit;
                pit.z.resize(data.size());
                for (std::size_t i = 0; i < data.size(); ++i) pit.z[i] = base.cdf(data.y(i));
                if (key.method == "parametric") {
                    TrainConfig cfg = spec.parametric_config;
                    cfg.seed = cell_seed;
                    fitted = std::make_unique<ParametricPitModel>(
                        fit_parametric(data, pit, cfg));
                } else {
                    TrainConfig cfg = nonparametric_defaults(key.n, cell_seed);
                    fitted = std::make_unique<MonotoneNet>(fit_nonparametric(data, pit, cfg));
                }
            }
        } catch (const std::exception& e) {
            proto.failed = true;
            proto.error = e.what();
        }
        for (std::size_t t = 0; t < n_points; ++t) {
            ConvergenceCell cell = proto;
            cell.test_point = t;
            if (!cell.failed) {
                auto x = spec.test_points.row(t);
                auto true_curve = oracle.curve(x);
                auto hat_curve = cell.method == "true" ? oracle.curve(x) : fitted->curve(x);
                cell.ise = ise_pit(*hat_curve, *true_curve, base, spec.ise_grid).value;
            }
            result.cells[ki * n_points + t] = std::move(cell);
        }
    });
    return result;
}

void write_convergence_csv(std::ostream& os, const ConvergenceResult& result) {
    os << "method,N,replicate,test_point,ise\n";
    for (const auto& c : result.cells) {
        os << c.method << ',' << c.n << ',' << c.replicate << ',' << c.test_point << ',';
        if (c.failed)
            os << "error:" << c.error;
        else
            os << csv::number(c.ise);
        os << '\n';
    }
}

void write_convergence_summary_csv(std::ostream& os, const ConvergenceResult& result) {
    os << "method,N,mean,sd\n";
    for (const auto& r : result.summary())
        os << r.method << ',' << r.n << ',' << csv::number(r.mean) << ',' << csv::number(r.sd)
           << '\n';
}

namespace {

// Leading eigenvector of a symmetric matrix by power iteration. Returns the
// eigenvalue; the vector is written in place.
double power_iterate(const Matrix& c, std::vector<double>& v) {
    const std::size_t d = v.size();
    // Deterministic, mildly tilted start so no coordinate hyperplane traps it.
    for (std::size_t j = 0; j < d; ++j) v[j] = 1.0 + 0.01 * static_cast<double>(j + 1);
    double norm = 0.0;
    for (double x : v) norm += x * x;
    for (double& x : v) x /= std::sqrt(norm);

    std::vector<double> next(d);
    double lambda = 0.0;
    for (int it = 0; it < 1000; ++it) {
        for (std::size_t i = 0; i < d; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < d; ++j) acc += c(i, j) * v[j];
            next[i] = acc;
        }
        double nn = 0.0;
        for (double x : next) nn += x * x;
        nn = std::sqrt(nn);
        if (nn == 0.0) return 0.0;
        double dot = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            next[j] /= nn;
            dot += next[j] * v[j];
        }
        double sign = dot < 0.0 ? -1.0 : 1.0;
        double drift = 0.0;
        for (std::size_t j = 0; j < d; ++j) drift = std::max(drift, std::abs(sign * next[j] - v[j]));
        v = next;
        if (sign < 0.0)
            for (double& x : v) x = -x;
        lambda = nn;
        if (drift < 1e-14) break;
    }
    // Canonical sign: largest-magnitude entry positive.
    std::size_t arg = 0;
    for (std::size_t j = 1; j < d; ++j)
        if (std::abs(v[j]) > std::abs(v[arg])) arg = j;
    if (v[arg] < 0.0)
        for (double& x : v) x = -x;
    return lambda;
}

} // namespace

PcaLdsMap pca2_lds_map(const CalibrationSet& data, const PitModel& model, std::size_t grid_size,
                       Exec exec) {
    const std::size_t n = data.size(), d = data.dim();
    if (n < 3) throw std::invalid_argument("pca2_lds_map: need at least 3 rows");

    std::vector<double> mean(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) mean[j] += data.features(i, j);
    for (double& m : mean) m /= static_cast<double>(n);

    Matrix centered(n, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) centered(i, j) = data.features(i, j) - mean[j];

    Matrix cov(d, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t a = 0; a < d; ++a) {
            double va = centered(i, a);
            for (std::size_t b = a; b < d; ++b) cov(a, b) += va * centered(i, b);
        }
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = a; b < d; ++b) {
            cov(a, b) /= static_cast<double>(n - 1);
            cov(b, a) = cov(a, b);
        }

    PcaLdsMap out;
    std::vector<std::vector<double>> dirs;
    std::vector<double> v(d);
    double lambda1 = power_iterate(cov, v);
    if (lambda1 > 1e-30) {
        dirs.push_back(v);
        out.eigenvalues.push_back(lambda1);
        // Deflate and repeat.
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = 0; b < d; ++b) cov(a, b) -= lambda1 * v[a] * v[b];
        std::vector<double> w(d);
        double lambda2 = power_iterate(cov, w);
        if (lambda2 > 1e-12 * lambda1 && d > 1) {
            // Re-orthogonalize against the first direction.
            double dot = 0.0;
            for (std::size_t j = 0; j < d; ++j) dot += w[j] * v[j];
            double norm = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                w[j] -= dot * v[j];
                norm += w[j] * w[j];
            }
            norm = std::sqrt(norm);
            if (norm > 0.0) {
                for (double& x : w) x /= norm;
                dirs.push_back(w);
                out.eigenvalues.push_back(lambda2);
            }
        }
    }
    out.components = dirs.size();
    out.rank_deficient = out.components < std::min<std::size_t>(2, d);

    out.directions = Matrix(out.components, d);
    for (std::size_t k = 0; k < out.components; ++k)
        for (std::size_t j = 0; j < d; ++j) out.directions(k, j) = dirs[k][j];

    out.coords = Matrix(n, out.components);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < out.components; ++k) {
            double acc = 0.0;
            for (std::size_t j = 0; j < d; ++j) acc += centered(i, j) * out.directions(k, j);
            out.coords(i, k) = acc;
        }

    out.lds = lds_batch(model, data.features, grid_size, exec);
    return out;
}

void write_pca_lds_csv(std::ostream& os, const PcaLdsMap& map) {
    os << "pc1,pc2,lds\n";
    for (std::size_t i = 0; i < map.coords.rows(); ++i) {
        os << (map.components > 0 ? csv::number(map.coords(i, 0)) : std::string()) << ','
           << (map.components > 1 ? csv::number(map.coords(i, 1)) : std::string()) << ','
           << csv::number(map.lds[i]) << '\n';
    }
}

} // namespace pitcal
