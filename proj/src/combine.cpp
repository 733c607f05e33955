#include "zigp/combine.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "zigp/errors.hpp"

namespace zigp {

namespace {

void check_grids(const HurdleRaster& h, const ExtremesRaster& e) {
    if (h.cells.size() != e.cells.size())
        throw data_error("combine: rasters differ in cell count");
    for (size_t i = 0; i < h.cells.size(); ++i)
        if (h.cells[i].x != e.cells[i].x || h.cells[i].y != e.cells[i].y)
            throw data_error("combine: rasters are on different grids (cell " +
                             std::to_string(i) + ")");
}

CombinedRaster prepare(const HurdleRaster& h, const ExtremesRaster& e, double u) {
    check_grids(h, e);
    CombinedRaster out;
    out.cells = h.cells;
    out.threshold = u;
    out.d_hat.resize(h.cells.size());
    out.source.resize(h.cells.size());
    out.weight.assign(h.cells.size(), 0.0);
    return out;
}

}  // namespace

CombinedRaster combine_a(const HurdleRaster& hurdle, const ExtremesRaster& extremes, double u) {
    CombinedRaster out = prepare(hurdle, extremes, u);
    for (size_t i = 0; i < out.cells.size(); ++i) {
        if (hurdle.density_mean[i] <= u) {
            out.d_hat[i] = hurdle.density_mean[i];
            out.source[i] = "model_i";
        } else {
            out.d_hat[i] = extremes.exc_mean[i] + u;
            out.source[i] = "model_ii";
        }
    }
    return out;
}

CombinedRaster combine_b(const HurdleRaster& hurdle, const ExtremesRaster& extremes, double u) {
    CombinedRaster out = prepare(hurdle, extremes, u);
    for (size_t i = 0; i < out.cells.size(); ++i) {
        if (extremes.pstar_mean[i] > 0.5) {
            out.d_hat[i] = extremes.exc_mean[i] + u;
            out.source[i] = "model_ii";
        } else {
            out.d_hat[i] = hurdle.density_mean[i];
            out.source[i] = "model_i";
        }
    }
    return out;
}

CombinedRaster combine_c(const HurdleRaster& hurdle, const ExtremesRaster& extremes, double u) {
    CombinedRaster out = prepare(hurdle, extremes, u);
    for (size_t i = 0; i < out.cells.size(); ++i) {
        double p = extremes.pstar_mean[i];
        out.d_hat[i] = p * (extremes.exc_mean[i] + u) + (1.0 - p) * hurdle.density_mean[i];
        out.source[i] = "blended";
        out.weight[i] = p;
    }
    return out;
}

void CombinedRaster::write_csv(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw data_error("cannot write " + path);
    f << "cell_x,cell_y,d_hat,source,weight\n";
    char buf[160];
    for (size_t i = 0; i < cells.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%s,%.17g\n", cells[i].x, cells[i].y,
                      d_hat[i], source[i].c_str(), weight[i]);
        f << buf;
    }
}

void write_combined_csv(const std::string& path, const CombinedRaster& a,
                        const CombinedRaster& b, const CombinedRaster& c) {
    std::ofstream f(path);
    if (!f) throw data_error("cannot write " + path);
    f << "cell_x,cell_y,d_hat_a,d_hat_b,d_hat_c,source_a,source_b,weight_c\n";
    char buf[256];
    for (size_t i = 0; i < a.cells.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%s,%s,%.17g\n",
                      a.cells[i].x, a.cells[i].y, a.d_hat[i], b.d_hat[i], c.d_hat[i],
                      a.source[i].c_str(), b.source[i].c_str(), c.weight[i]);
        f << buf;
    }
}

}  // namespace zigp
