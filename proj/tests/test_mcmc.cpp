#include <doctest.h>

#include <cmath>

#include "zigp/inference.hpp"
#include "zigp/mesh.hpp"
#include "zigp/rng.hpp"

using namespace zigp;

namespace {

SubModelSpec gaussian_field_spec(int n, std::uint64_t seed, Eigen::VectorXd* closed_mean) {
    TriMesh mesh = build_mesh(BBox{0, 0, 5, 5}, 1.4, 0.7);
    FemMatrices fem = fem_matrices(mesh);

    Rng rng(seed);
    std::vector<Point> pts;
    for (int i = 0; i < n; ++i) pts.push_back({rng.uniform(0.0, 5.0), rng.uniform(0.0, 5.0)});

    SubModelSpec spec;
    spec.kind = Likelihood::gaussian;
    spec.gauss_noise_sd = 0.6;
    spec.optimize_hypers = false;  // known field hyperparameters
    spec.prior_anchor = FieldHyper{2.0, 0.8};
    spec.x.resize(n, 2);
    spec.x.col(0).setOnes();
    for (int i = 0; i < n; ++i) spec.x(i, 1) = rng.normal();
    spec.a = basis_matrix(mesh, pts);
    spec.fem = fem;
    spec.names = {"b0", "b1"};
    spec.y.resize(n);
    for (int i = 0; i < n; ++i) spec.y[i] = 0.8 - 0.4 * spec.x(i, 1) + 0.5 * rng.normal();

    if (closed_mean) {
        const int nl = spec.n_latent();
        Eigen::MatrixXd j(n, nl);
        j.leftCols(2) = spec.x;
        j.rightCols(spec.n_field()) = Eigen::MatrixXd(spec.a);
        SparsePrecision q = spde_precision(fem, spec.prior_anchor);
        Eigen::MatrixXd prior = Eigen::MatrixXd::Zero(nl, nl);
        prior(0, 0) = prior(1, 1) = 1.0 / (spec.beta_prior_sd * spec.beta_prior_sd);
        prior.bottomRightCorner(spec.n_field(), spec.n_field()) = Eigen::MatrixXd(q.q);
        double s2 = spec.gauss_noise_sd * spec.gauss_noise_sd;
        Eigen::MatrixXd h = prior + j.transpose() * j / s2;
        *closed_mean = h.ldlt().solve(j.transpose() * spec.y / s2);
    }
    return spec;
}

}  // namespace

TEST_CASE("mcmc matches the conjugate gaussian posterior within monte carlo error") {
    Eigen::VectorXd closed_mean;
    SubModelSpec spec = gaussian_field_spec(150, 31, &closed_mean);

    McmcSettings settings;
    settings.chains = 2;
    settings.iterations = 3000;
    settings.seed = 5;
    SubModelFit fit = fit_mcmc(spec, settings);

    for (int j = 0; j < 2; ++j) {
        double err = std::abs(fit.post.fixed[j].mean - closed_mean[j]);
        CHECK(err < 3.0 * fit.beta_mcse[j] + 1e-3);
    }
    CHECK(fit.max_rhat < 1.1);
}

TEST_CASE("fixed seed reproduces chains exactly") {
    SubModelSpec spec = gaussian_field_spec(60, 17, nullptr);
    McmcSettings settings;
    settings.chains = 2;
    settings.iterations = 2000;
    settings.seed = 42;

    SubModelFit a = fit_mcmc(spec, settings);
    SubModelFit b = fit_mcmc(spec, settings);
    REQUIRE(a.chains.size() == b.chains.size());
    for (size_t c = 0; c < a.chains.size(); ++c)
        CHECK((a.chains[c] - b.chains[c]).norm() == 0.0);
    CHECK((a.latent_draws - b.latent_draws).norm() == 0.0);
}

TEST_CASE("laplace and mcmc agree on a simulated gamma sub-model") {
    TriMesh mesh = build_mesh(BBox{0, 0, 5, 5}, 1.4, 0.7);
    FemMatrices fem = fem_matrices(mesh);
    FieldHyper truth_hyper{2.0, 0.4};

    Rng rng(901);
    const int n = 500;
    SparsePrecision q = spde_precision(fem, truth_hyper);
    Eigen::VectorXd w = sample_field(q, rng);

    std::vector<Point> pts;
    for (int i = 0; i < n; ++i) pts.push_back({rng.uniform(0.0, 5.0), rng.uniform(0.0, 5.0)});

    SubModelSpec spec;
    spec.kind = Likelihood::gamma;
    spec.prior_anchor = truth_hyper;
    spec.x.resize(n, 2);
    spec.x.col(0).setOnes();
    for (int i = 0; i < n; ++i) spec.x(i, 1) = rng.normal();
    spec.a = basis_matrix(mesh, pts);
    spec.fem = fem;
    spec.names = {"b0", "b1"};
    spec.y.resize(n);
    const double phi_true = 2.0;
    for (int i = 0; i < n; ++i) {
        double eta = 0.7 + 0.5 * spec.x(i, 1) + spec.a.row(i).dot(w);
        spec.y[i] = rng.gamma(phi_true, phi_true * std::exp(-eta));
    }

    SubModelFit lap = fit_laplace(spec);
    McmcSettings settings;
    settings.chains = 2;
    settings.iterations = 3000;
    settings.seed = 11;
    SubModelFit mc = fit_mcmc(spec, settings);

    for (int j = 0; j < 2; ++j)
        CHECK(std::abs(lap.post.fixed[j].mean - mc.post.fixed[j].mean) < 0.1);
}

TEST_CASE("mcmc input validation") {
    SubModelSpec spec = gaussian_field_spec(30, 3, nullptr);
    McmcSettings s;
    s.iterations = 500;  // too few
    CHECK_THROWS(fit_mcmc(spec, s));
    s.iterations = 2000;
    s.chains = 1;
    CHECK_THROWS(fit_mcmc(spec, s));
}
