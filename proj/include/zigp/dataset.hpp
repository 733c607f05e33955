#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "zigp/mesh.hpp"

namespace zigp {

// Point-referenced observation table.
struct Dataset {
    std::vector<Point> coords;
    Eigen::VectorXd response;
    std::map<std::string, Eigen::VectorXd> covariates;

    int n() const { return static_cast<int>(coords.size()); }
};

// Regular raster of cell centers with per-cell covariate values.
struct PredictionGrid {
    double cell = 1.0;
    int nx = 0, ny = 0;
    std::vector<Point> centers;
    std::map<std::string, Eigen::VectorXd> covariates;

    int n() const { return static_cast<int>(centers.size()); }

    static PredictionGrid regular(const BBox& box, double cell_size);
};

// Centering/scaling applied to covariates before fitting; reported
// coefficients are on this standardized scale.
struct Standardization {
    std::vector<std::string> names;
    Eigen::VectorXd mean, sd;

    // Design matrix [1 | standardized covariates] at the given locations.
    Eigen::MatrixXd design(const std::map<std::string, Eigen::VectorXd>& covs, int n_rows) const;
};

Standardization standardize_covariates(const Dataset& data,
                                       const std::vector<std::string>& names);

}  // namespace zigp
