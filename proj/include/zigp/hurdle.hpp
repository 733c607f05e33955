#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "zigp/dataset.hpp"
#include "zigp/inference.hpp"

namespace zigp {

enum class Engine { laplace, mcmc };

struct FitOptions {
    Engine engine = Engine::laplace;
    McmcSettings mcmc;
    double prior_range = 0.0;  // 0: a fifth of the domain diameter
    double prior_sd = 1.0;
    double hyper_prior_sd = 1.0;  // width of the log-scale hyper priors
    double xi_lo = 0.0, xi_hi = 0.5;
    std::uint64_t seed = 1;
};

// Model I: Bernoulli presence sub-model on all rows, Gamma positive-density
// sub-model on the rows with y > 0, independent latent fields.
struct HurdleFit {
    SubModelFit presence;
    SubModelFit positive;
    Standardization standardize;
    int n_total = 0, n_positive = 0;
    std::vector<std::string> flags;
};

HurdleFit fit_hurdle(const Dataset& data, const std::vector<std::string>& covariates,
                     const TriMesh& mesh, const FitOptions& opts);

struct HurdleRaster {
    std::vector<Point> cells;
    std::vector<double> p_mean, p_sd, cond_mean, cond_sd, density_mean;

    void write_csv(const std::string& path) const;
};

// Posterior functionals per cell by averaging the nonlinear transforms over
// latent draws; density_mean is the total-expectation product
// p_mean * cond_mean.
HurdleRaster predict_hurdle(const HurdleFit& fit, const TriMesh& mesh,
                            const PredictionGrid& grid, int ndraws, std::uint64_t seed);

}  // namespace zigp
