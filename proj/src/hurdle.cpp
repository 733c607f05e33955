#include "zigp/hurdle.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "zigp/errors.hpp"

namespace zigp {

PredictionGrid PredictionGrid::regular(const BBox& box, double cell_size) {
    if (!(cell_size > 0.0)) throw usage_error("prediction grid: cell size must be positive");
    PredictionGrid g;
    g.cell = cell_size;
    g.nx = std::max(1, static_cast<int>(std::ceil(box.width() / cell_size - 1e-12)));
    g.ny = std::max(1, static_cast<int>(std::ceil(box.height() / cell_size - 1e-12)));
    g.centers.reserve(static_cast<size_t>(g.nx) * g.ny);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            g.centers.push_back({box.xmin + (i + 0.5) * cell_size, box.ymin + (j + 0.5) * cell_size});
    return g;
}

Standardization standardize_covariates(const Dataset& data,
                                       const std::vector<std::string>& names) {
    Standardization s;
    s.names = names;
    const int k = static_cast<int>(names.size());
    s.mean.resize(k);
    s.sd.resize(k);
    for (int j = 0; j < k; ++j) {
        auto it = data.covariates.find(names[j]);
        if (it == data.covariates.end())
            throw data_error("covariate '" + names[j] + "' not found in dataset");
        const Eigen::VectorXd& v = it->second;
        if (v.size() != data.n())
            throw data_error("covariate '" + names[j] + "' length does not match dataset");
        double m = v.mean();
        double sd = std::sqrt((v.array() - m).square().sum() / std::max(1, data.n() - 1));
        if (!(sd > 0.0))
            throw data_error("covariate '" + names[j] + "' is constant; cannot standardize");
        s.mean[j] = m;
        s.sd[j] = sd;
    }
    return s;
}

Eigen::MatrixXd Standardization::design(const std::map<std::string, Eigen::VectorXd>& covs,
                                        int n_rows) const {
    const int k = static_cast<int>(names.size());
    Eigen::MatrixXd x(n_rows, k + 1);
    x.col(0).setOnes();
    for (int j = 0; j < k; ++j) {
        auto it = covs.find(names[j]);
        if (it == covs.end()) throw data_error("covariate '" + names[j] + "' missing");
        if (it->second.size() != n_rows)
            throw data_error("covariate '" + names[j] + "' has wrong length");
        x.col(j + 1) = (it->second.array() - mean[j]) / sd[j];
    }
    return x;
}

namespace {

std::vector<std::string> effect_names(const std::vector<std::string>& covariates,
                                      const std::string& prefix) {
    std::vector<std::string> out{prefix + ".intercept"};
    for (const auto& c : covariates) out.push_back(prefix + "." + c);
    return out;
}

SubModelFit run_engine(const SubModelSpec& spec, const FitOptions& opts) {
    if (opts.engine == Engine::mcmc) {
        McmcSettings s = opts.mcmc;
        s.seed = s.seed == 1 ? opts.seed : s.seed;
        return fit_mcmc(spec, s);
    }
    return fit_laplace(spec);
}

}  // namespace

HurdleFit fit_hurdle(const Dataset& data, const std::vector<std::string>& covariates,
                     const TriMesh& mesh, const FitOptions& opts) {
    const int n = data.n();
    if (n == 0) throw data_error("fit_hurdle: empty dataset");
    for (int i = 0; i < n; ++i)
        if (data.response[i] < 0.0)
            throw data_error("fit_hurdle: response must be nonnegative (row " +
                             std::to_string(i) + ")");

    HurdleFit fit;
    fit.n_total = n;
    std::vector<int> pos_rows;
    for (int i = 0; i < n; ++i)
        if (data.response[i] > 0.0) pos_rows.push_back(i);
    fit.n_positive = static_cast<int>(pos_rows.size());
    if (fit.n_positive == 0)
        throw data_error("fit_hurdle: response is all zero; the positive sub-model cannot be fit");
    if (fit.n_positive == n) fit.flags.push_back("presence sub-model degenerate: no zeros in data");

    fit.standardize = standardize_covariates(data, covariates);
    Eigen::MatrixXd x_all = fit.standardize.design(data.covariates, n);
    BasisMatrix a_all = basis_matrix(mesh, data.coords);
    FemMatrices fem = fem_matrices(mesh);

    double diam = std::hypot(mesh.domain.width(), mesh.domain.height());
    FieldHyper anchor{opts.prior_range > 0.0 ? opts.prior_range : 0.2 * diam, opts.prior_sd};

    // Presence sub-model on all rows.
    SubModelSpec presence;
    presence.kind = Likelihood::bernoulli;
    presence.y.resize(n);
    for (int i = 0; i < n; ++i) presence.y[i] = data.response[i] > 0.0 ? 1.0 : 0.0;
    presence.x = x_all;
    presence.a = a_all;
    presence.fem = fem;
    presence.names = effect_names(covariates, "presence");
    presence.prior_anchor = anchor;
    presence.hyper_prior_sd = opts.hyper_prior_sd;

    // Positive sub-model on the y > 0 rows.
    SubModelSpec positive;
    positive.kind = Likelihood::gamma;
    positive.y.resize(fit.n_positive);
    positive.x.resize(fit.n_positive, x_all.cols());
    std::vector<Point> pos_coords(fit.n_positive);
    for (int r = 0; r < fit.n_positive; ++r) {
        positive.y[r] = data.response[pos_rows[r]];
        positive.x.row(r) = x_all.row(pos_rows[r]);
        pos_coords[r] = data.coords[pos_rows[r]];
    }
    positive.a = basis_matrix(mesh, pos_coords);
    positive.fem = fem;
    positive.names = effect_names(covariates, "positive");
    positive.prior_anchor = anchor;
    positive.hyper_prior_sd = opts.hyper_prior_sd;

    fit.presence = run_engine(presence, opts);
    fit.positive = run_engine(positive, opts);

    for (const auto& s : fit.positive.post.fixed)
        if (s.sd > 0.5 * presence.beta_prior_sd) {
            fit.flags.push_back("positive sub-model weakly identified: posterior sd of " +
                                s.name + " near its prior");
            break;
        }
    for (const auto& f : fit.presence.post.flags) fit.flags.push_back(f);
    for (const auto& f : fit.positive.post.flags) fit.flags.push_back(f);
    return fit;
}

HurdleRaster predict_hurdle(const HurdleFit& fit, const TriMesh& mesh,
                            const PredictionGrid& grid, int ndraws, std::uint64_t seed) {
    const int nc = grid.n();
    Eigen::MatrixXd x = fit.standardize.design(grid.covariates, nc);
    BasisMatrix a = basis_matrix(mesh, grid.centers);

    Eigen::MatrixXd pres = fit.presence.sample_latent(ndraws, seed);
    Eigen::MatrixXd posi = fit.positive.sample_latent(ndraws, seed + 1);

    HurdleRaster out;
    out.cells = grid.centers;
    out.p_mean.assign(nc, 0.0);
    out.p_sd.assign(nc, 0.0);
    out.cond_mean.assign(nc, 0.0);
    out.cond_sd.assign(nc, 0.0);
    out.density_mean.assign(nc, 0.0);

    const int m = fit.presence.n_fixed;
    if (fit.presence.n_field > 0 && fit.presence.n_field != a.cols())
        throw usage_error("predict_hurdle: fit and mesh disagree on node count");
    Eigen::VectorXd sum_p = Eigen::VectorXd::Zero(nc), ss_p = Eigen::VectorXd::Zero(nc);
    Eigen::VectorXd sum_c = Eigen::VectorXd::Zero(nc), ss_c = Eigen::VectorXd::Zero(nc);
    for (int k = 0; k < ndraws; ++k) {
        Eigen::VectorXd eta1 = x * pres.col(k).head(m);
        Eigen::VectorXd eta2 = x * posi.col(k).head(m);
        if (fit.presence.n_field > 0) eta1 += a * pres.col(k).tail(fit.presence.n_field);
        if (fit.positive.n_field > 0) eta2 += a * posi.col(k).tail(fit.positive.n_field);
        for (int i = 0; i < nc; ++i) {
            double p = inv_logit(eta1[i]);
            double c = std::exp(eta2[i]);
            sum_p[i] += p;
            ss_p[i] += p * p;
            sum_c[i] += c;
            ss_c[i] += c * c;
        }
    }
    for (int i = 0; i < nc; ++i) {
        double pm = sum_p[i] / ndraws;
        double cm = sum_c[i] / ndraws;
        out.p_mean[i] = pm;
        out.cond_mean[i] = cm;
        out.p_sd[i] = std::sqrt(std::max(0.0, ss_p[i] / ndraws - pm * pm));
        out.cond_sd[i] = std::sqrt(std::max(0.0, ss_c[i] / ndraws - cm * cm));
        out.density_mean[i] = pm * cm;
    }
    return out;
}

void HurdleRaster::write_csv(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw data_error("cannot write " + path);
    f << "cell_x,cell_y,p_mean,p_sd,cond_mean,cond_sd,density_mean\n";
    char buf[256];
    for (size_t i = 0; i < cells.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", cells[i].x,
                      cells[i].y, p_mean[i], p_sd[i], cond_mean[i], cond_sd[i], density_mean[i]);
        f << buf;
    }
}

}  // namespace zigp
