#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "zigp/gmrf.hpp"
#include "zigp/likelihoods.hpp"
#include "zigp/mesh.hpp"
#include "zigp/rng.hpp"

namespace zigp {

enum class Likelihood { gaussian, bernoulli, gamma, gp };

// One sub-model of the bivariate hierarchies: a latent Gaussian vector
// u = (beta, w) observed through a likelihood with linear predictor
// eta = X beta + A w. The field block w is absent when A has zero columns.
struct SubModelSpec {
    Likelihood kind = Likelihood::gaussian;
    Eigen::VectorXd y;
    Eigen::MatrixXd x;              // n x M, column 0 is the intercept
    Eigen::SparseMatrix<double> a;  // n x N basis projection, N may be 0
    FemMatrices fem;                // required when N > 0
    std::vector<std::string> names;

    double beta_prior_sd = 31.622776601683793;  // N(0, 1000) on fixed effects
    double gauss_noise_sd = 1.0;                // gaussian kind: known noise sd
    FieldHyper prior_anchor{1.0, 1.0};          // prior means for (range, sd)
    double hyper_prior_sd = 1.0;
    double xi_lo = 0.0, xi_hi = 0.5;  // gp shape support

    bool optimize_hypers = true;
    double phi_init = 1.0;
    double xi_init = 0.2;
    int max_newton = 50;
    double newton_tol = 1e-6;
    double outer_tol = 1e-4;
    int max_outer_sweeps = 60;

    int n() const { return static_cast<int>(y.size()); }
    int m() const { return static_cast<int>(x.cols()); }
    int n_field() const { return static_cast<int>(a.cols()); }
    bool has_field() const { return a.cols() > 0; }
    int n_latent() const { return m() + n_field(); }
    int n_hyper() const;

    void validate() const;
};

struct ParamSummary {
    std::string name;
    double mean = 0.0, sd = 0.0;
    double q025 = 0.0, q50 = 0.0, q975 = 0.0;
};

struct PosteriorApprox {
    std::vector<ParamSummary> fixed;
    Eigen::VectorXd w_mean, w_sd;
    std::vector<ParamSummary> hyper;  // user scale: field_range, field_sd, ...
    double log_marginal = 0.0;
    std::vector<std::string> flags;
};

// Quantiles by linear interpolation of order statistics (R type 7).
double quantile(std::vector<double> draws, double p);
ParamSummary summarize_draws(const std::string& name, std::vector<double> draws);

// Column j of `chains` holds one parameter's pooled draws.
PosteriorApprox posterior_summary(const std::vector<std::string>& names,
                                  const Eigen::MatrixXd& chains);

struct SubModelFit {
    PosteriorApprox post;

    // Gaussian approximation at the joint latent mode.
    Eigen::VectorXd mode;  // (M+N)
    std::shared_ptr<const Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>> hess_chol;
    Eigen::VectorXd theta;     // internal-scale hyper optimum
    Eigen::MatrixXd theta_cov;

    // MCMC engine only: thinned joint draws and per-chain histories.
    Eigen::MatrixXd latent_draws;               // (M+N) x K
    Eigen::MatrixXd hyper_draws;                // nhyper x K, internal scale
    std::vector<Eigen::MatrixXd> chains;        // per chain: (M + nhyper) x kept
    Eigen::VectorXd beta_mcse, beta_ess, rhat;  // rhat spans beta then hypers
    double max_rhat = 0.0;

    // Snapshot of the spec fields prediction needs.
    Likelihood kind = Likelihood::gaussian;
    int n_fixed = 0, n_field = 0;
    double xi_lo = 0.0, xi_hi = 0.5;
    std::vector<std::string> names;

    // Draws from the latent posterior (Gaussian approximation for the Laplace
    // engine, stored chain draws for MCMC), deterministic in seed.
    Eigen::MatrixXd sample_latent(int ndraws, std::uint64_t seed) const;
    // Matching hyperparameter draws on the internal scale.
    Eigen::MatrixXd sample_hyper(int ndraws, std::uint64_t seed) const;
    double xi_of(const Eigen::VectorXd& theta_point) const;
};

struct McmcSettings {
    int chains = 4;
    int iterations = 5000;
    int burnin = -1;  // defaults to iterations / 2
    std::uint64_t seed = 1;
    int keep_latent = 1000;  // thinned joint draws kept across all chains
};

// MAP-plus-Laplace engine: Newton on the latent vector inside, coordinate
// search with quadratic refinement on the hyperparameters outside.
SubModelFit fit_laplace(const SubModelSpec& spec);

// Metropolis-within-Gibbs validator: latent block by an independence proposal
// from the Laplace approximation at the current hyperparameters, adaptive
// random walk on the hyperparameters, split-Rhat convergence check.
SubModelFit fit_mcmc(const SubModelSpec& spec, const McmcSettings& settings);

void write_chains_csv(const SubModelFit& fit, const std::string& path);

// Internal-scale hyper layout: [log_kappa, log_tau] when a field is present,
// then log_phi (gamma) or xi_raw (gp, scaled-logit transform).
namespace detail {

struct HyperLayout {
    bool field = false;
    int idx_phi = -1, idx_xi = -1;
    int dim = 0;
};
HyperLayout hyper_layout(const SubModelSpec& spec);
Eigen::VectorXd initial_theta(const SubModelSpec& spec);
double xi_from_raw(double raw, double lo, double hi);
double raw_from_xi(double xi, double lo, double hi);

// Penalized log-likelihood machinery shared by the two engines.
struct Objective {
    const SubModelSpec* spec;
    detail::HyperLayout layout;

    // State at a given theta.
    SparsePrecision prec;  // empty when no field
    double phi = 1.0, xi = 0.2;
    double log_hyper_prior = 0.0;

    void set_theta(const Eigen::VectorXd& theta);
    // Joint log density log p(y|u,theta) + log p(u|theta); -inf when invalid.
    double joint(const Eigen::VectorXd& u) const;
    // Newton optimization of u at the current theta; returns the mode and
    // fills the curvature factorization and log-determinant.
    Eigen::VectorXd newton_mode(Eigen::VectorXd u0,
                                Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>& chol,
                                double* half_log_det, int* iters) const;
    // Laplace-approximated log marginal posterior of theta (up to a constant).
    double laplace_objective(Eigen::VectorXd& u_warm) const;
};

}  // namespace detail

}  // namespace zigp
