#include "zigp/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "zigp/errors.hpp"

namespace zigp {

std::vector<double> nadaraya_watson(const std::vector<Point>& obs_points,
                                    const std::vector<double>& obs_values,
                                    const std::vector<Point>& targets, double bandwidth) {
    if (obs_points.empty()) throw data_error("nadaraya_watson: no observations");
    if (obs_points.size() != obs_values.size())
        throw usage_error("nadaraya_watson: points and values differ in length");
    if (!(bandwidth > 0.0)) throw usage_error("nadaraya_watson: bandwidth must be positive");

    const double inv2h2 = 1.0 / (2.0 * bandwidth * bandwidth);
    std::vector<double> out(targets.size());
    for (size_t t = 0; t < targets.size(); ++t) {
        double num = 0.0, den = 0.0;
        for (size_t i = 0; i < obs_points.size(); ++i) {
            double dx = targets[t].x - obs_points[i].x;
            double dy = targets[t].y - obs_points[i].y;
            double w = std::exp(-(dx * dx + dy * dy) * inv2h2);
            num += w * obs_values[i];
            den += w;
        }
        if (den == 0.0)
            throw numeric_error("nadaraya_watson: all kernel weights vanish at target " +
                                std::to_string(t) + " (" + std::to_string(targets[t].x) + ", " +
                                std::to_string(targets[t].y) + "); enlarge the bandwidth");
        out[t] = num / den;
    }
    return out;
}

double default_bandwidth(const std::vector<Point>& points) {
    if (points.size() < 2) throw data_error("default_bandwidth: need at least two points");
    std::vector<double> nn(points.size());
    for (size_t i = 0; i < points.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (size_t j = 0; j < points.size(); ++j) {
            if (i == j) continue;
            double dx = points[i].x - points[j].x;
            double dy = points[i].y - points[j].y;
            best = std::min(best, dx * dx + dy * dy);
        }
        nn[i] = std::sqrt(best);
    }
    std::sort(nn.begin(), nn.end());
    size_t mid = nn.size() / 2;
    double med = (nn.size() % 2 == 1) ? nn[mid] : 0.5 * (nn[mid - 1] + nn[mid]);
    if (med == 0.0) med = nn.back();  // duplicated locations
    return 3.0 * med;
}

}  // namespace zigp
