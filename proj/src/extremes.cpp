#include "zigp/extremes.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "zigp/errors.hpp"

namespace zigp {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kZ975 = 1.959963984540054;

std::vector<std::string> effect_names_star(const std::vector<std::string>& covariates,
                                           const std::string& prefix) {
    std::vector<std::string> out{prefix + ".intercept"};
    for (const auto& c : covariates) out.push_back(prefix + "." + c);
    return out;
}

McmcSettings with_seed(McmcSettings s, std::uint64_t seed) {
    s.seed = seed;
    return s;
}

}  // namespace

ThresholdDiag mean_residual_life(const std::vector<double>& y,
                                 const std::vector<double>& thresholds) {
    if (y.empty()) throw data_error("mean_residual_life: empty sample");
    for (size_t i = 1; i < thresholds.size(); ++i)
        if (!(thresholds[i] > thresholds[i - 1]))
            throw usage_error("mean_residual_life: thresholds must be strictly ascending");

    ThresholdDiag d;
    d.thresholds = thresholds;
    for (double u : thresholds) {
        double sum = 0.0, ss = 0.0;
        int n = 0;
        for (double v : y)
            if (v > u) {
                double e = v - u;
                sum += e;
                ss += e * e;
                ++n;
            }
        d.n_exceed.push_back(n);
        if (n == 0) {
            d.mean_excess.push_back(kNan);
            d.ci_lo.push_back(kNan);
            d.ci_hi.push_back(kNan);
            continue;
        }
        double mean = sum / n;
        double var = n > 1 ? (ss - n * mean * mean) / (n - 1) : 0.0;
        double half = 1.96 * std::sqrt(std::max(var, 0.0) / n);
        d.mean_excess.push_back(mean);
        d.ci_lo.push_back(mean - half);
        d.ci_hi.push_back(mean + half);
    }
    return d;
}

GpMle gp_mle(const std::vector<double>& exceedances, double xi_lo, double xi_hi,
             int min_exceed) {
    GpMle out;
    const int n = static_cast<int>(exceedances.size());
    if (n < min_exceed) {
        out.flagged = true;
        out.flag = "too few exceedances (" + std::to_string(n) + " < " +
                   std::to_string(min_exceed) + ")";
        return out;
    }
    for (double v : exceedances)
        if (!(v > 0.0)) throw data_error("gp_mle: exceedances must be positive");

    double mean = 0.0, vmin = exceedances[0], vmax = exceedances[0];
    for (double v : exceedances) {
        mean += v;
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
    }
    mean /= n;
    if (vmax - vmin < 1e-12 * vmax) {
        out.flagged = true;
        out.flag = "degenerate sample: all exceedances equal";
        return out;
    }

    // Negative log-likelihood over (log sigma, xi_raw), shape kept inside
    // (xi_lo, xi_hi) by a scaled logit.
    auto xi_of = [&](double raw) { return xi_lo + (xi_hi - xi_lo) * inv_logit(raw); };
    auto nll = [&](double ls, double raw) {
        double sigma = std::exp(ls), xi = xi_of(raw);
        double s = 0.0;
        for (double v : exceedances) {
            double u = xi * v / sigma;
            if (u <= -1.0) return 1e30;
            s += ls + (1.0 + 1.0 / xi) * std::log1p(u);
        }
        return s;
    };

    // Nelder-Mead in 2-D.
    struct Vertex {
        double ls, raw, f;
    };
    double ls0 = std::log(mean), raw0 = 0.0;
    std::array<Vertex, 3> simplex{Vertex{ls0, raw0, nll(ls0, raw0)},
                                  Vertex{ls0 + 0.5, raw0, nll(ls0 + 0.5, raw0)},
                                  Vertex{ls0, raw0 + 0.8, nll(ls0, raw0 + 0.8)}};
    for (int it = 0; it < 400; ++it) {
        std::sort(simplex.begin(), simplex.end(),
                  [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
        if (std::abs(simplex[2].f - simplex[0].f) < 1e-11 * (1.0 + std::abs(simplex[0].f)))
            break;
        double cls = 0.5 * (simplex[0].ls + simplex[1].ls);
        double craw = 0.5 * (simplex[0].raw + simplex[1].raw);
        Vertex refl{2.0 * cls - simplex[2].ls, 2.0 * craw - simplex[2].raw, 0.0};
        refl.f = nll(refl.ls, refl.raw);
        if (refl.f < simplex[0].f) {
            Vertex exp_{cls + 2.0 * (refl.ls - cls), craw + 2.0 * (refl.raw - craw), 0.0};
            exp_.f = nll(exp_.ls, exp_.raw);
            simplex[2] = exp_.f < refl.f ? exp_ : refl;
        } else if (refl.f < simplex[1].f) {
            simplex[2] = refl;
        } else {
            Vertex con{cls + 0.5 * (simplex[2].ls - cls), craw + 0.5 * (simplex[2].raw - craw),
                       0.0};
            con.f = nll(con.ls, con.raw);
            if (con.f < simplex[2].f) {
                simplex[2] = con;
            } else {
                for (int k = 1; k < 3; ++k) {
                    simplex[k].ls = 0.5 * (simplex[k].ls + simplex[0].ls);
                    simplex[k].raw = 0.5 * (simplex[k].raw + simplex[0].raw);
                    simplex[k].f = nll(simplex[k].ls, simplex[k].raw);
                }
            }
        }
    }
    std::sort(simplex.begin(), simplex.end(),
              [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
    out.sigma = std::exp(simplex[0].ls);
    out.xi = xi_of(simplex[0].raw);

    const double margin = 0.01 * (xi_hi - xi_lo);
    if (out.xi < xi_lo + margin || out.xi > xi_hi - margin) {
        out.flagged = true;
        out.flag = "shape estimate at the support boundary";
    }

    // Observed information in (sigma, xi) by central differences.
    auto nll_sx = [&](double sigma, double xi) {
        double s = 0.0;
        for (double v : exceedances) {
            double u = xi * v / sigma;
            if (u <= -1.0 || sigma <= 0.0) return 1e30;
            s += std::log(sigma) + (1.0 + 1.0 / xi) * std::log1p(u);
        }
        return s;
    };
    double hs = 1e-4 * std::max(out.sigma, 1.0), hx = 1e-4;
    Eigen::Matrix2d info;
    double f0 = nll_sx(out.sigma, out.xi);
    info(0, 0) = (nll_sx(out.sigma + hs, out.xi) - 2 * f0 + nll_sx(out.sigma - hs, out.xi)) /
                 (hs * hs);
    info(1, 1) = (nll_sx(out.sigma, out.xi + hx) - 2 * f0 + nll_sx(out.sigma, out.xi - hx)) /
                 (hx * hx);
    info(0, 1) = info(1, 0) =
        (nll_sx(out.sigma + hs, out.xi + hx) - nll_sx(out.sigma + hs, out.xi - hx) -
         nll_sx(out.sigma - hs, out.xi + hx) + nll_sx(out.sigma - hs, out.xi - hx)) /
        (4 * hs * hx);
    double det = info.determinant();
    if (det <= 0.0 || info(0, 0) <= 0.0) {
        out.flagged = true;
        if (out.flag.empty()) out.flag = "observed information not positive definite";
        out.cov.setZero();
    } else {
        out.cov = info.inverse();
    }
    return out;
}

StabilityTable stability_table(const std::vector<double>& y,
                               const std::vector<double>& thresholds, int min_exceed) {
    StabilityTable table;
    for (double u : thresholds) {
        StabilityRow row;
        row.threshold = u;
        std::vector<double> exc;
        for (double v : y)
            if (v > u) exc.push_back(v - u);
        row.n_exceed = static_cast<int>(exc.size());
        if (row.n_exceed >= min_exceed) {
            GpMle mle = gp_mle(exc, -0.45, 0.95, min_exceed);
            if (mle.cov(0, 0) > 0.0) {  // information matrix usable
                row.fitted = true;
                row.xi = mle.xi;
                double se_xi = std::sqrt(std::max(mle.cov(1, 1), 0.0));
                row.xi_lo = mle.xi - kZ975 * se_xi;
                row.xi_hi = mle.xi + kZ975 * se_xi;
                row.mod_scale = mle.sigma - mle.xi * u;
                // var(sigma - xi u) from the estimate covariance
                double var = mle.cov(0, 0) + u * u * mle.cov(1, 1) - 2.0 * u * mle.cov(0, 1);
                double se = std::sqrt(std::max(var, 0.0));
                row.mod_scale_lo = row.mod_scale - kZ975 * se;
                row.mod_scale_hi = row.mod_scale + kZ975 * se;
            }
        }
        table.rows.push_back(row);
    }
    return table;
}

ExtremesFit fit_extremes(const Dataset& data, const std::vector<std::string>& covariates,
                         const TriMesh& mesh, double threshold, const FitOptions& opts,
                         int min_exceed) {
    const int n = data.n();
    if (n == 0) throw data_error("fit_extremes: empty dataset");

    ExtremesFit fit;
    fit.threshold = threshold;
    fit.n_total = n;
    std::vector<int> exc_rows;
    for (int i = 0; i < n; ++i)
        if (data.response[i] > threshold) exc_rows.push_back(i);
    fit.n_exceed = static_cast<int>(exc_rows.size());
    if (fit.n_exceed < min_exceed)
        throw data_error("fit_extremes: only " + std::to_string(fit.n_exceed) +
                         " exceedances above u=" + std::to_string(threshold) +
                         "; choose a lower threshold");

    fit.standardize = standardize_covariates(data, covariates);
    Eigen::MatrixXd x_all = fit.standardize.design(data.covariates, n);
    BasisMatrix a_all = basis_matrix(mesh, data.coords);
    FemMatrices fem = fem_matrices(mesh);

    double diam = std::hypot(mesh.domain.width(), mesh.domain.height());
    FieldHyper anchor{opts.prior_range > 0.0 ? opts.prior_range : 0.2 * diam, opts.prior_sd};

    SubModelSpec prob;
    prob.kind = Likelihood::bernoulli;
    prob.y.resize(n);
    for (int i = 0; i < n; ++i) prob.y[i] = data.response[i] > threshold ? 1.0 : 0.0;
    prob.x = x_all;
    prob.a = a_all;
    prob.fem = fem;
    prob.names = effect_names_star(covariates, "exceed_prob");
    prob.prior_anchor = anchor;
    prob.hyper_prior_sd = opts.hyper_prior_sd;

    SubModelSpec exc;
    exc.kind = Likelihood::gp;
    exc.xi_lo = opts.xi_lo;
    exc.xi_hi = opts.xi_hi;
    exc.y.resize(fit.n_exceed);
    exc.x.resize(fit.n_exceed, x_all.cols());
    std::vector<Point> exc_coords(fit.n_exceed);
    for (int r = 0; r < fit.n_exceed; ++r) {
        exc.y[r] = data.response[exc_rows[r]] - threshold;
        exc.x.row(r) = x_all.row(exc_rows[r]);
        exc_coords[r] = data.coords[exc_rows[r]];
    }
    exc.a = basis_matrix(mesh, exc_coords);
    exc.fem = fem;
    exc.names = effect_names_star(covariates, "exceed");
    exc.prior_anchor = anchor;
    exc.hyper_prior_sd = opts.hyper_prior_sd;

    fit.exceed_prob = opts.engine == Engine::mcmc
                          ? fit_mcmc(prob, with_seed(opts.mcmc, opts.seed))
                          : fit_laplace(prob);
    fit.exceed = opts.engine == Engine::mcmc
                     ? fit_mcmc(exc, with_seed(opts.mcmc, opts.seed + 0x9d2c5680u))
                     : fit_laplace(exc);

    for (const auto& f : fit.exceed_prob.post.flags) fit.flags.push_back(f);
    for (const auto& f : fit.exceed.post.flags) fit.flags.push_back(f);
    return fit;
}

ExtremesRaster predict_extremes(const ExtremesFit& fit, const TriMesh& mesh,
                                const PredictionGrid& grid, int ndraws, std::uint64_t seed) {
    const int nc = grid.n();
    Eigen::MatrixXd x = fit.standardize.design(grid.covariates, nc);
    BasisMatrix a = basis_matrix(mesh, grid.centers);

    Eigen::MatrixXd prob = fit.exceed_prob.sample_latent(ndraws, seed);
    Eigen::MatrixXd exc = fit.exceed.sample_latent(ndraws, seed + 1);
    Eigen::MatrixXd hyp = fit.exceed.sample_hyper(ndraws, seed + 2);

    ExtremesRaster out;
    out.cells = grid.centers;
    out.pstar_mean.assign(nc, 0.0);
    out.pstar_sd.assign(nc, 0.0);
    out.exc_mean.assign(nc, 0.0);
    out.exc_sd.assign(nc, 0.0);

    const int m = fit.exceed_prob.n_fixed;
    Eigen::VectorXd sum_p = Eigen::VectorXd::Zero(nc), ss_p = Eigen::VectorXd::Zero(nc);
    Eigen::VectorXd sum_e = Eigen::VectorXd::Zero(nc), ss_e = Eigen::VectorXd::Zero(nc);
    for (int k = 0; k < ndraws; ++k) {
        Eigen::VectorXd eta1 = x * prob.col(k).head(m);
        Eigen::VectorXd eta2 = x * exc.col(k).head(m);
        if (fit.exceed_prob.n_field > 0) eta1 += a * prob.col(k).tail(fit.exceed_prob.n_field);
        if (fit.exceed.n_field > 0) eta2 += a * exc.col(k).tail(fit.exceed.n_field);
        double xi = fit.exceed.xi_of(hyp.col(k));
        if (!(xi < 1.0))
            throw numeric_error("predict_extremes: drawn shape >= 1, conditional mean undefined");
        for (int i = 0; i < nc; ++i) {
            double p = inv_logit(eta1[i]);
            double sigma = sigma_from_median(std::exp(eta2[i]), xi);
            double e = sigma / (1.0 - xi);
            sum_p[i] += p;
            ss_p[i] += p * p;
            sum_e[i] += e;
            ss_e[i] += e * e;
        }
    }
    for (int i = 0; i < nc; ++i) {
        double pm = sum_p[i] / ndraws;
        double em = sum_e[i] / ndraws;
        out.pstar_mean[i] = pm;
        out.exc_mean[i] = em;
        out.pstar_sd[i] = std::sqrt(std::max(0.0, ss_p[i] / ndraws - pm * pm));
        out.exc_sd[i] = std::sqrt(std::max(0.0, ss_e[i] / ndraws - em * em));
    }
    return out;
}

void ThresholdDiag::write_csv(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw data_error("cannot write " + path);
    f << "threshold,n_exceed,mean_excess,ci_lo,ci_hi\n";
    char buf[160];
    for (size_t i = 0; i < thresholds.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%d,%.17g,%.17g,%.17g\n", thresholds[i],
                      n_exceed[i], mean_excess[i], ci_lo[i], ci_hi[i]);
        f << buf;
    }
}

void StabilityTable::write_csv(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw data_error("cannot write " + path);
    f << "threshold,n_exceed,fitted,xi,xi_lo,xi_hi,mod_scale,mod_scale_lo,mod_scale_hi\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%.17g,%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      r.threshold, r.n_exceed, r.fitted ? 1 : 0, r.xi, r.xi_lo, r.xi_hi,
                      r.mod_scale, r.mod_scale_lo, r.mod_scale_hi);
        f << buf;
    }
}

void ExtremesRaster::write_csv(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw data_error("cannot write " + path);
    f << "cell_x,cell_y,pstar_mean,pstar_sd,exc_mean,exc_sd\n";
    char buf[224];
    for (size_t i = 0; i < cells.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", cells[i].x,
                      cells[i].y, pstar_mean[i], pstar_sd[i], exc_mean[i], exc_sd[i]);
        f << buf;
    }
}

}  // namespace zigp
