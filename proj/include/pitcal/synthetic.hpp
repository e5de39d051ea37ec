#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pitcal/distributions.hpp"
#include "pitcal/parallel.hpp"
#include "pitcal/pit.hpp"
#include "pitcal/pit_model.hpp"
#include "pitcal/train_config.hpp"

namespace pitcal {

/// Sampling design for the sinh-arcsinh benchmark: covariates drawn
/// uniformly from the fixed box S = [-2,2] x (0,2] x [-2,2] x (0,2], with
/// the SAS shape parameters (mu, sigma, eps, delta) read off the four
/// covariate dimensions.
struct SasDesign {
    std::size_t n = 0;
    std::uint64_t seed = 0;
};

constexpr std::size_t kSasDim = 4;

/// Covariates uniform over S, responses by inverse-CDF sampling from the SAS
/// law at each x. Reproducible by seed.
CalibrationSet gen_sas_dataset(const SasDesign& design);

/// The true conditional law F(y|x) = SAS_{x1,x2,x3,x4}(y).
class SasTruthFamily final : public ConditionalFamily {
public:
    std::unique_ptr<ScalarDistribution> at(std::span<const double> x) const override;
};

SasParams sas_params_from(std::span<const double> x);

/// Analytic true conditional PIT-CDF for the standard normal base:
/// G(alpha|x) = F(Phi^{-1}(alpha) | x).
double true_pit_cdf(double alpha, std::span<const double> x);

/// Analytic oracle as a PitModel (with density), usable anywhere a fitted
/// map is.
class SasOraclePitModel final : public PitModel {
public:
    std::unique_ptr<PitCurve> curve(std::span<const double> x) const override;
    std::size_t input_dim() const override { return kSasDim; }
    std::string kind() const override { return "sas_oracle"; }
};

/// Two fixed evaluation points spanning the skew and tail-weight regimes of
/// S; rows of the returned matrix.
Matrix default_test_points();

struct ConvergenceSpec {
    std::vector<std::size_t> n_grid = {5, 10, 25, 50, 100, 200};
    std::size_t replicates = 10;
    Matrix test_points = default_test_points();
    std::vector<std::string> methods = {"parametric", "nonparametric", "true"};
    std::uint64_t seed = 0;
    TrainConfig parametric_config;  // seed replaced per cell
    std::size_t ise_grid = 2048;

    void validate() const;
};

struct ConvergenceCell {
    std::string method;
    std::size_t n = 0;
    std::size_t replicate = 0;
    std::size_t test_point = 0;
    double ise = 0.0;
    bool failed = false;
    std::string error;
};

struct ConvergenceResult {
    std::vector<ConvergenceCell> cells;

    /// Mean ISE over successful replicates for one (method, N, test point).
    double mean_ise(const std::string& method, std::size_t n, std::size_t test_point) const;

    struct SummaryRow {
        std::string method;
        std::size_t n;
        double mean;
        double sd;
    };
    /// Pooled over replicates and test points, per (method, N).
    std::vector<SummaryRow> summary() const;
};

/// Fits fresh maps per (method, N, replicate) cell and evaluates the ISE at
/// every test point. Cells run independently (per-cell RNG streams), so the
/// parallel and serial policies agree bitwise. Individual fit failures are
/// recorded per cell, not fatal.
ConvergenceResult convergence_experiment(const ConvergenceSpec& spec,
                                         Exec exec = Exec::parallel);

void write_convergence_csv(std::ostream& os, const ConvergenceResult& result);
void write_convergence_summary_csv(std::ostream& os, const ConvergenceResult& result);

/// Mean-centered projection onto the top two principal directions (power
/// iteration with deflation) with the fitted map's LDS at every data point.
struct PcaLdsMap {
    std::size_t components = 0; // may be < 2 for rank-deficient data
    bool rank_deficient = false;
    Matrix directions; // components x d, orthonormal rows
    std::vector<double> eigenvalues;
    Matrix coords; // n x components
    std::vector<double> lds;
};

PcaLdsMap pca2_lds_map(const CalibrationSet& data, const PitModel& model,
                       std::size_t grid_size = kDefaultDiagnosticGrid,
                       Exec exec = Exec::parallel);

void write_pca_lds_csv(std::ostream& os, const PcaLdsMap& map);

} // namespace pitcal
