#pragma once

#include <vector>

#include "zigp/mesh.hpp"

namespace zigp {

// Gaussian-kernel weighted average of the observations at each target:
// g(u) = sum_i k(u - s_i) y_i / sum_i k(u - s_i), with k the isotropic
// Gaussian density of standard deviation `bandwidth`.
std::vector<double> nadaraya_watson(const std::vector<Point>& obs_points,
                                    const std::vector<double>& obs_values,
                                    const std::vector<Point>& targets, double bandwidth);

// Default bandwidth rule: 3 times the median nearest-neighbor distance.
double default_bandwidth(const std::vector<Point>& points);

}  // namespace zigp
