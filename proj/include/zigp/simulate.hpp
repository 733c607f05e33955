#pragma once

#include <cstdint>
#include <vector>

#include "zigp/dataset.hpp"
#include "zigp/gmrf.hpp"

namespace zigp {

// Smooth synthetic covariate surface on the unit-scaled domain:
// a0 + ax sin(2 pi fx tx + px) + ay sin(2 pi fy ty + py) + axy tx ty
// with tx, ty the coordinates rescaled to [0, 1] over `box`.
struct SmoothSurface {
    BBox box;
    double a0 = 0.0, ax = 1.0, fx = 1.0, px = 0.0;
    double ay = 1.0, fy = 1.0, py = 0.0, axy = 0.0;

    double at(const Point& p) const;
};

enum class SampleLayout { uniform, transect };

struct SimParams {
    int n_covariates = 2;
    double alpha_presence = 0.0;
    double alpha_positive = 1.0;
    std::vector<double> beta_presence{1.0, 0.0};
    std::vector<double> beta_positive{0.5, 0.0};
    FieldHyper hyper_presence{2.0, 0.5};
    FieldHyper hyper_positive{2.0, 0.5};
    bool field_presence = true;
    bool field_positive = true;
    double phi = 2.0;
    SampleLayout layout = SampleLayout::uniform;
    double transect_spacing = 1.0;  // transect layout: line separation
};

// Heavy-tail contamination: with probability tail_mix a positive draw is
// replaced by u plus a GP exceedance whose median surface has its own
// regression structure and field.
struct TailParams {
    double tail_mix = 0.1;
    double u = 15.0;
    double xi = 0.4;
    double alpha_q = 3.2;  // log median intercept
    std::vector<double> beta_q{0.5, 0.0};
    FieldHyper hyper_q{2.0, 0.3};
    bool field_q = true;
};

struct SimTruth {
    SimParams params;
    std::vector<SmoothSurface> surfaces;
    Eigen::VectorXd w_presence, w_positive;  // nodal fields, empty if absent

    bool composite = false;
    TailParams tail;
    Eigen::VectorXd w_q;

    // Exact E[Y] at arbitrary locations, for RMSE benchmarks.
    Eigen::VectorXd expected_density(const TriMesh& mesh, const std::vector<Point>& at) const;

    // True presence probability and conditional positive mean surfaces.
    void latent_surfaces(const TriMesh& mesh, const std::vector<Point>& at,
                         Eigen::VectorXd* presence, Eigen::VectorXd* cond_mean) const;
};

struct SimResult {
    Dataset data;
    SimTruth truth;
};

// Forward simulation of Model I: fields sampled on the mesh, covariates from
// seeded smooth surfaces, Z Bernoulli through the logit link, positive draws
// Gamma with log-mean link.
SimResult simulate_hurdle(const TriMesh& mesh, const SimParams& params, int n,
                          std::uint64_t seed);

// Model I draw with a GP tail mixed into the positives; tail_mix = 0
// reproduces simulate_hurdle exactly (same seed path).
SimResult simulate_composite(const TriMesh& mesh, const SimParams& params,
                             const TailParams& tail, int n, std::uint64_t seed);

// Deterministic survey-scale fixture: 553 rows on transects, 49% presence,
// positives spanning 0.1..664 with 30 values above 20 and 17 above 35.
Dataset survey_fixture();

}  // namespace zigp
