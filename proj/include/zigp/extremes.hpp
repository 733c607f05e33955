#pragma once

#include <optional>
#include <string>
#include <vector>

#include "zigp/hurdle.hpp"

namespace zigp {

// Mean-residual-life table: per threshold u, the sample mean of (y - u | y > u)
// with a normal-approximation 95% band.
struct ThresholdDiag {
    std::vector<double> thresholds;
    std::vector<int> n_exceed;
    std::vector<double> mean_excess;  // NaN where n_exceed == 0
    std::vector<double> ci_lo, ci_hi;

    void write_csv(const std::string& path) const;
};

ThresholdDiag mean_residual_life(const std::vector<double>& y,
                                 const std::vector<double>& thresholds);

// Standalone (non-spatial) GP maximum-likelihood fit for diagnostics.
struct GpMle {
    double sigma = 0.0, xi = 0.0;
    Eigen::Matrix2d cov;  // of (sigma, xi) from the inverse observed information
    bool flagged = false;
    std::string flag;
};

GpMle gp_mle(const std::vector<double>& exceedances, double xi_lo = -0.45, double xi_hi = 0.95,
             int min_exceed = 10);

// Per-threshold GP fits with the modified scale sigma* = sigma - xi u.
struct StabilityRow {
    double threshold = 0.0;
    int n_exceed = 0;
    bool fitted = false;
    double xi = 0.0, xi_lo = 0.0, xi_hi = 0.0;
    double mod_scale = 0.0, mod_scale_lo = 0.0, mod_scale_hi = 0.0;
};

struct StabilityTable {
    std::vector<StabilityRow> rows;
    void write_csv(const std::string& path) const;
};

StabilityTable stability_table(const std::vector<double>& y,
                               const std::vector<double>& thresholds, int min_exceed = 10);

// Model II: exceedance-indicator sub-model on all rows, GP sub-model on the
// shifted exceedances y - u.
struct ExtremesFit {
    SubModelFit exceed_prob;  // Bernoulli on 1{y > u}
    SubModelFit exceed;       // GP on y - u
    Standardization standardize;
    double threshold = 0.0;
    int n_total = 0, n_exceed = 0;
    std::vector<std::string> flags;
};

ExtremesFit fit_extremes(const Dataset& data, const std::vector<std::string>& covariates,
                         const TriMesh& mesh, double threshold, const FitOptions& opts,
                         int min_exceed = 10);

struct ExtremesRaster {
    std::vector<Point> cells;
    std::vector<double> pstar_mean, pstar_sd, exc_mean, exc_sd;

    void write_csv(const std::string& path) const;
};

// Conditional exceedance mean per draw is sigma(s) / (1 - xi), with sigma from
// the median link and the drawn shape.
ExtremesRaster predict_extremes(const ExtremesFit& fit, const TriMesh& mesh,
                                const PredictionGrid& grid, int ndraws, std::uint64_t seed);

}  // namespace zigp
