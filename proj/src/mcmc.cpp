#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>
#include <thread>

#include "zigp/errors.hpp"
#include "zigp/inference.hpp"

namespace zigp {

namespace {

using detail::Objective;

struct SplitMoments {
    // Welford accumulators per parameter for one half-chain.
    Eigen::VectorXd mean, m2;
    long count = 0;
    void init(int dim) {
        mean = Eigen::VectorXd::Zero(dim);
        m2 = Eigen::VectorXd::Zero(dim);
        count = 0;
    }
    void add(const Eigen::VectorXd& x) {
        ++count;
        Eigen::VectorXd d = x - mean;
        mean += d / static_cast<double>(count);
        m2 += d.cwiseProduct(x - mean);
    }
    Eigen::VectorXd var() const {
        return count > 1 ? Eigen::VectorXd(m2 / static_cast<double>(count - 1))
                         : Eigen::VectorXd::Zero(mean.size());
    }
};

// Split-Rhat from per-split means and variances (Gelman et al.).
Eigen::VectorXd split_rhat(const std::vector<SplitMoments>& splits) {
    const int nsplit = static_cast<int>(splits.size());
    const int dim = static_cast<int>(splits[0].mean.size());
    Eigen::VectorXd rhat(dim);
    double n = static_cast<double>(splits[0].count);
    for (int j = 0; j < dim; ++j) {
        double grand = 0.0, w = 0.0;
        for (const auto& s : splits) {
            grand += s.mean[j];
            w += s.var()[j];
        }
        grand /= nsplit;
        w /= nsplit;
        double b = 0.0;
        for (const auto& s : splits) b += (s.mean[j] - grand) * (s.mean[j] - grand);
        b *= n / (nsplit - 1.0);
        double var_plus = (n - 1.0) / n * w + b / n;
        rhat[j] = (w > 0.0) ? std::sqrt(var_plus / w) : 1.0;
    }
    return rhat;
}

// Effective sample size with Geyer's initial positive sequence.
double effective_sample_size(const std::vector<Eigen::VectorXd>& chains) {
    const int nchain = static_cast<int>(chains.size());
    const int t = static_cast<int>(chains[0].size());
    if (t < 4) return static_cast<double>(nchain * t);

    Eigen::VectorXd chain_mean(nchain), chain_var(nchain);
    std::vector<Eigen::VectorXd> centered(nchain);
    for (int c = 0; c < nchain; ++c) {
        double m = chains[c].mean();
        chain_mean[c] = m;
        centered[c] = chains[c].array() - m;
        chain_var[c] = centered[c].squaredNorm() / (t - 1.0);
    }
    double w = chain_var.mean();
    double b = 0.0;
    double grand = chain_mean.mean();
    for (int c = 0; c < nchain; ++c) b += (chain_mean[c] - grand) * (chain_mean[c] - grand);
    b = nchain > 1 ? b * t / (nchain - 1.0) : 0.0;
    double var_plus = (t - 1.0) / t * w + (nchain > 1 ? b / t : 0.0);
    if (var_plus <= 0.0) return static_cast<double>(nchain * t);

    double sum_rho = 0.0;
    double prev_pair = std::numeric_limits<double>::infinity();
    for (int lag = 1; lag + 1 < t; lag += 2) {
        double acov0 = 0.0, acov1 = 0.0;
        for (int c = 0; c < nchain; ++c) {
            for (int i = 0; i + lag < t; ++i) acov0 += centered[c][i] * centered[c][i + lag];
            for (int i = 0; i + lag + 1 < t; ++i) acov1 += centered[c][i] * centered[c][i + lag + 1];
        }
        acov0 /= nchain * t;
        acov1 /= nchain * t;
        double rho0 = 1.0 - (w - acov0) / var_plus;
        double rho1 = 1.0 - (w - acov1) / var_plus;
        double pair = rho0 + rho1;
        if (pair < 0.0) break;
        pair = std::min(pair, prev_pair);  // enforce monotone decay
        prev_pair = pair;
        sum_rho += pair;
    }
    double ess = nchain * t / (1.0 + 2.0 * sum_rho);
    return std::min(ess, static_cast<double>(nchain * t));
}

struct ChainResult {
    Eigen::MatrixXd small;         // (m + d) x kept: beta then theta
    Eigen::MatrixXd latent_kept;   // (m+n) x kc thinned joint draws
    Eigen::MatrixXd hyper_kept;    // d x kc aligned with latent_kept
    SplitMoments w_half[2];        // field draws per half-chain
    double accept_latent = 0.0, accept_hyper = 0.0;
};

void run_chain(const SubModelSpec& spec, const McmcSettings& settings, int chain_id,
               const Eigen::VectorXd& theta0, const Eigen::VectorXd& mode0,
               const Eigen::MatrixXd& theta_cov, ChainResult& out) {
    const int m = spec.m(), nf = spec.n_field(), nl = m + nf;
    const int d = static_cast<int>(theta0.size());
    const int iters = settings.iterations;
    const int burnin = settings.burnin >= 0 ? settings.burnin : iters / 2;
    const int kept = iters - burnin;
    const int kc = std::max(1, settings.keep_latent / std::max(1, settings.chains));
    const int stride = std::max(1, kept / kc);

    Rng rng(settings.seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(chain_id + 1));
    const bool sample_hypers = spec.optimize_hypers && d > 0;

    Objective cur, prop;
    cur.spec = prop.spec = &spec;
    cur.layout = prop.layout = detail::hyper_layout(spec);

    Eigen::VectorXd theta = theta0;
    cur.set_theta(theta);

    // Correlated proposal for the hyper walk from the Laplace curvature.
    Eigen::MatrixXd prop_chol = Eigen::MatrixXd::Identity(d, d) * 0.5;
    if (d > 0 && theta_cov.rows() == d) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(theta_cov);
        prop_chol = es.eigenvectors() *
                    es.eigenvalues().cwiseMax(1e-6).cwiseSqrt().asDiagonal();
    }
    double step = d > 0 ? 2.38 / std::sqrt(static_cast<double>(d)) : 0.0;

    using Chol = Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>;
    auto chol = std::make_unique<Chol>();
    double half_log_det = 0.0;
    Eigen::VectorXd mode = cur.newton_mode(mode0, *chol, &half_log_det, nullptr);

    // Jitter the start so chains are overdispersed around the mode.
    Eigen::VectorXd u(nl);
    {
        Eigen::VectorXd z(nl);
        for (int i = 0; i < nl; ++i) z[i] = rng.normal();
        u = mode + 2.0 * (chol->permutationPinv() * chol->matrixU().solve(z));
    }
    double f_cur = cur.joint(u);
    // log q(v) up to the common (nl/2) log 2pi constant
    auto proposal_logq = [](const Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>& fac,
                            double hld, const Eigen::VectorXd& center,
                            const Eigen::VectorXd& v) {
        Eigen::VectorXd t = fac.permutationP() * (v - center);
        Eigen::VectorXd lt = fac.matrixU() * t;
        return hld - 0.5 * lt.squaredNorm();
    };
    double lq_cur = proposal_logq(*chol, half_log_det, mode, u);

    out.small.resize(m + d, kept);
    out.latent_kept.resize(nl, kc);
    out.hyper_kept.resize(d, kc);
    out.w_half[0].init(nf);
    out.w_half[1].init(nf);

    long acc_l = 0, acc_h = 0, n_h = 0;
    int kept_count = 0;

    for (int it = 0; it < iters; ++it) {
        // Latent block: independence proposal from the Gaussian approximation.
        {
            Eigen::VectorXd z(nl);
            for (int i = 0; i < nl; ++i) z[i] = rng.normal();
            Eigen::VectorXd u_new = mode + chol->permutationPinv() * chol->matrixU().solve(z);
            double lq_new = half_log_det - 0.5 * z.squaredNorm();
            double f_new = cur.joint(u_new);
            double log_alpha = (f_new - f_cur) - (lq_new - lq_cur);
            if (std::log(rng.uniform()) < log_alpha) {
                u = u_new;
                f_cur = f_new;
                lq_cur = lq_new;
                ++acc_l;
            }
        }
        // Hyper block: random walk on theta that carries the latent block
        // along, refreshed from the Laplace approximation at the proposed
        // theta; acceptance therefore tracks the marginal posterior of theta.
        if (sample_hypers) {
            Eigen::VectorXd z(d), zu(nl);
            for (int k = 0; k < d; ++k) z[k] = rng.normal();
            for (int i = 0; i < nl; ++i) zu[i] = rng.normal();
            Eigen::VectorXd theta_new = theta + step * (prop_chol * z);

            double log_alpha = -std::numeric_limits<double>::infinity();
            bool feasible = true;
            auto chol_new = std::make_unique<Chol>();
            double hld_new = 0.0, f_new = 0.0, lq_new = 0.0;
            Eigen::VectorXd mode_new, u_new;
            try {
                prop.set_theta(theta_new);
                mode_new = prop.newton_mode(mode, *chol_new, &hld_new, nullptr);
                u_new = mode_new + chol_new->permutationPinv() * chol_new->matrixU().solve(zu);
                lq_new = hld_new - 0.5 * zu.squaredNorm();
                f_new = prop.joint(u_new);
                log_alpha = (f_new + prop.log_hyper_prior - lq_new) -
                            (f_cur + cur.log_hyper_prior - lq_cur);
            } catch (const Error&) {
                feasible = false;  // unreachable corner of the hyper space
            }
            bool acc = feasible && std::log(rng.uniform()) < log_alpha;
            if (acc) {
                std::swap(cur, prop);
                theta = theta_new;
                mode = mode_new;
                std::swap(chol, chol_new);
                half_log_det = hld_new;
                u = u_new;
                f_cur = f_new;
                lq_cur = lq_new;
                ++acc_h;
            }
            ++n_h;
            if (it < burnin) {
                double alpha = feasible ? std::min(1.0, std::exp(log_alpha)) : 0.0;
                double gamma = 2.0 / std::sqrt(static_cast<double>(it + 1));
                step *= std::exp(gamma * (alpha - 0.3));
                step = std::clamp(step, 1e-3, 20.0);
            }
        }
        // Record.
        if (it >= burnin) {
            int rec = it - burnin;
            out.small.col(rec).head(m) = u.head(m);
            if (d > 0) out.small.col(rec).tail(d) = theta;
            out.w_half[rec < kept / 2 ? 0 : 1].add(u.tail(nf));
            if (rec % stride == 0 && kept_count < kc) {
                out.latent_kept.col(kept_count) = u;
                if (d > 0) out.hyper_kept.col(kept_count) = theta;
                ++kept_count;
            }
        }
    }
    while (kept_count < kc) {  // pad from the final state if thinning fell short
        out.latent_kept.col(kept_count) = u;
        if (d > 0) out.hyper_kept.col(kept_count) = theta;
        ++kept_count;
    }
    out.accept_latent = static_cast<double>(acc_l) / iters;
    out.accept_hyper = n_h > 0 ? static_cast<double>(acc_h) / n_h : 0.0;
}

}  // namespace

SubModelFit fit_mcmc(const SubModelSpec& spec, const McmcSettings& settings) {
    spec.validate();
    if (settings.iterations < 2000) throw usage_error("fit_mcmc: iterations must be >= 2000");
    if (settings.chains < 2) throw usage_error("fit_mcmc: at least 2 chains required");

    const int m = spec.m(), nf = spec.n_field();
    const int d = spec.n_hyper();

    // Warm start and preconditioning from the Laplace engine.
    SubModelFit base = fit_laplace(spec);

    std::vector<ChainResult> results(settings.chains);
    {
        std::vector<std::thread> threads;
        for (int c = 0; c < settings.chains; ++c)
            threads.emplace_back([&, c] {
                run_chain(spec, settings, c, base.theta, base.mode, base.theta_cov, results[c]);
            });
        for (auto& t : threads) t.join();
    }

    SubModelFit fit;
    fit.kind = spec.kind;
    fit.n_fixed = m;
    fit.n_field = nf;
    fit.xi_lo = spec.xi_lo;
    fit.xi_hi = spec.xi_hi;
    fit.names = spec.names;
    fit.theta = base.theta;
    fit.theta_cov = base.theta_cov;
    fit.mode = base.mode;
    fit.hess_chol = base.hess_chol;
    fit.post.log_marginal = base.post.log_marginal;

    const int kept = static_cast<int>(results[0].small.cols());
    const int half = kept / 2;

    // Pool thinned joint draws for prediction.
    int kc = static_cast<int>(results[0].latent_kept.cols());
    fit.latent_draws.resize(m + nf, kc * settings.chains);
    fit.hyper_draws.resize(d, kc * settings.chains);
    for (int c = 0; c < settings.chains; ++c) {
        fit.latent_draws.middleCols(c * kc, kc) = results[c].latent_kept;
        if (d > 0) fit.hyper_draws.middleCols(c * kc, kc) = results[c].hyper_kept;
    }
    for (auto& r : results) fit.chains.push_back(std::move(r.small));

    // Split-Rhat over beta and hypers from stored chains, field from moments.
    std::vector<SplitMoments> splits(2 * settings.chains);
    for (auto& s : splits) s.init(m + d);
    for (int c = 0; c < settings.chains; ++c)
        for (int i = 0; i < kept; ++i)
            splits[2 * c + (i < half ? 0 : 1)].add(fit.chains[c].col(i));
    fit.rhat = split_rhat(splits);

    Eigen::VectorXd w_rhat;
    if (nf > 0) {
        std::vector<SplitMoments> wsplits;
        for (int c = 0; c < settings.chains; ++c) {
            wsplits.push_back(results[c].w_half[0]);
            wsplits.push_back(results[c].w_half[1]);
        }
        w_rhat = split_rhat(wsplits);
    }
    fit.max_rhat = fit.rhat.size() > 0 ? fit.rhat.maxCoeff() : 1.0;
    if (nf > 0) fit.max_rhat = std::max(fit.max_rhat, w_rhat.maxCoeff());

    // Summaries from pooled draws.
    fit.beta_mcse.resize(m);
    fit.beta_ess.resize(m);
    for (int j = 0; j < m; ++j) {
        std::vector<double> pooled;
        std::vector<Eigen::VectorXd> per_chain;
        pooled.reserve(kept * settings.chains);
        for (int c = 0; c < settings.chains; ++c) {
            per_chain.push_back(fit.chains[c].row(j).transpose());
            for (int i = 0; i < kept; ++i) pooled.push_back(fit.chains[c](j, i));
        }
        ParamSummary s = summarize_draws(spec.names[j], pooled);
        double ess = effective_sample_size(per_chain);
        fit.beta_ess[j] = ess;
        fit.beta_mcse[j] = s.sd / std::sqrt(std::max(ess, 1.0));
        fit.post.fixed.push_back(s);
        if (fit.rhat[j] > 1.1)
            fit.post.flags.push_back("rhat above 1.1 for " + spec.names[j]);
    }
    for (int k = 0; k < d; ++k)
        if (fit.rhat[m + k] > 1.1)
            fit.post.flags.push_back("rhat above 1.1 for hyperparameter " + std::to_string(k));
    if (nf > 0)
        for (int j = 0; j < nf; ++j)
            if (w_rhat[j] > 1.1) {
                fit.post.flags.push_back("rhat above 1.1 for field node " + std::to_string(j));
                break;  // one flag is enough to mark the failure
            }

    // Field summaries from the pooled split moments.
    fit.post.w_mean = Eigen::VectorXd::Zero(nf);
    fit.post.w_sd = Eigen::VectorXd::Zero(nf);
    if (nf > 0) {
        SplitMoments all;
        all.init(nf);
        for (int c = 0; c < settings.chains; ++c)
            for (int i = 0; i < kc; ++i) all.add(results[c].latent_kept.col(i).tail(nf));
        fit.post.w_mean = all.mean;
        fit.post.w_sd = all.var().cwiseSqrt();
    }

    // Hyper summaries on the user scale from per-draw transforms.
    detail::HyperLayout layout = detail::hyper_layout(spec);
    auto hyper_col = [&](int k) {
        std::vector<double> v;
        v.reserve(kept * settings.chains);
        for (int c = 0; c < settings.chains; ++c)
            for (int i = 0; i < kept; ++i) v.push_back(fit.chains[c](m + k, i));
        return v;
    };
    if (layout.field) {
        std::vector<double> lk = hyper_col(0), lt = hyper_col(1);
        std::vector<double> range(lk.size()), sd(lk.size());
        for (size_t i = 0; i < lk.size(); ++i) {
            range[i] = range_from_kappa(std::exp(lk[i]));
            sd[i] = sd_from(std::exp(lk[i]), std::exp(lt[i]));
        }
        fit.post.hyper.push_back(summarize_draws("field_range", range));
        fit.post.hyper.push_back(summarize_draws("field_sd", sd));
    }
    if (layout.idx_phi >= 0) {
        std::vector<double> lp = hyper_col(layout.idx_phi);
        for (auto& v : lp) v = std::exp(v);
        fit.post.hyper.push_back(summarize_draws("gamma_shape", lp));
    }
    if (layout.idx_xi >= 0) {
        std::vector<double> xr = hyper_col(layout.idx_xi);
        for (auto& v : xr) v = detail::xi_from_raw(v, spec.xi_lo, spec.xi_hi);
        fit.post.hyper.push_back(summarize_draws("gp_shape", xr));
    }
    return fit;
}

void write_chains_csv(const SubModelFit& fit, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw data_error("cannot write " + path);
    f << "chain,iter";
    for (const auto& n : fit.names) f << ',' << n;
    const int d = static_cast<int>(fit.theta.size());
    for (int k = 0; k < d; ++k) f << ",theta" << k;
    f << '\n';
    char buf[64];
    for (size_t c = 0; c < fit.chains.size(); ++c) {
        const auto& ch = fit.chains[c];
        for (int i = 0; i < ch.cols(); ++i) {
            f << c << ',' << i;
            for (int r = 0; r < ch.rows(); ++r) {
                std::snprintf(buf, sizeof(buf), ",%.17g", ch(r, i));
                f << buf;
            }
            f << '\n';
        }
    }
}

}  // namespace zigp
