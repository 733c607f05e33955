#pragma once

#include <string>
#include <vector>

#include "zigp/extremes.hpp"
#include "zigp/hurdle.hpp"

namespace zigp {

// The three plug-in estimators merging the two model rasters into a single
// density surface. (a) switches where the Model I estimate itself crosses the
// threshold, (b) where the exceedance probability passes 0.5 (strictly), and
// (c) blends with the exceedance probability as the weight.
struct CombinedRaster {
    std::vector<Point> cells;
    std::vector<double> d_hat;
    std::vector<std::string> source;  // model_i | model_ii | blended
    std::vector<double> weight;       // blending weight (p*), approach (c) only
    double threshold = 0.0;

    void write_csv(const std::string& path) const;  // single-approach export
};

CombinedRaster combine_a(const HurdleRaster& hurdle, const ExtremesRaster& extremes, double u);
CombinedRaster combine_b(const HurdleRaster& hurdle, const ExtremesRaster& extremes, double u);
CombinedRaster combine_c(const HurdleRaster& hurdle, const ExtremesRaster& extremes, double u);

// The side-by-side export of all three approaches.
void write_combined_csv(const std::string& path, const CombinedRaster& a,
                        const CombinedRaster& b, const CombinedRaster& c);

}  // namespace zigp
