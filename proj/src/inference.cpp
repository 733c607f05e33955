#include "zigp/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "zigp/errors.hpp"

namespace zigp {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;
constexpr double kZ975 = 1.959963984540054;

double lognormal_mean(double mu, double var) { return std::exp(mu + 0.5 * var); }

ParamSummary lognormal_summary(const std::string& name, double mu, double var) {
    ParamSummary s;
    s.name = name;
    double sig = std::sqrt(std::max(var, 0.0));
    s.mean = lognormal_mean(mu, var);
    s.sd = s.mean * std::sqrt(std::expm1(std::max(var, 0.0)));
    s.q025 = std::exp(mu - kZ975 * sig);
    s.q50 = std::exp(mu);
    s.q975 = std::exp(mu + kZ975 * sig);
    return s;
}

ParamSummary gaussian_summary(const std::string& name, double mu, double sd) {
    ParamSummary s;
    s.name = name;
    s.mean = mu;
    s.sd = sd;
    s.q025 = mu - kZ975 * sd;
    s.q50 = mu;
    s.q975 = mu + kZ975 * sd;
    return s;
}

// Diagonal of H^-1 through the cached factorization, in column blocks.
Eigen::VectorXd inverse_diagonal(const Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>& chol,
                                 int n) {
    Eigen::VectorXd diag(n);
    const int block = 128;
    for (int j0 = 0; j0 < n; j0 += block) {
        int cols = std::min(block, n - j0);
        Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n, cols);
        for (int c = 0; c < cols; ++c) rhs(j0 + c, c) = 1.0;
        Eigen::MatrixXd sol = chol.solve(rhs);
        for (int c = 0; c < cols; ++c) diag[j0 + c] = sol(j0 + c, c);
    }
    return diag;
}

}  // namespace

int SubModelSpec::n_hyper() const {
    int d = has_field() ? 2 : 0;
    if (kind == Likelihood::gamma) ++d;
    if (kind == Likelihood::gp) ++d;
    return d;
}

void SubModelSpec::validate() const {
    if (x.rows() != y.size())
        throw data_error("sub-model: design matrix rows do not match response length");
    if (has_field() && a.rows() != y.size())
        throw data_error("sub-model: basis matrix rows do not match response length");
    if (has_field() && fem.n() != n_field())
        throw data_error("sub-model: FEM matrices do not match basis columns");
    if (static_cast<int>(names.size()) != m())
        throw usage_error("sub-model: fixed-effect names do not match design columns");
    // Identifiability check; n < M is allowed (the prior carries the fit).
    if (n() >= m() && n() > 0) {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
        if (qr.rank() < m()) throw data_error("sub-model: design matrix is rank deficient");
    }
    if (kind == Likelihood::bernoulli) {
        for (int i = 0; i < n(); ++i)
            if (y[i] != 0.0 && y[i] != 1.0)
                throw data_error("sub-model: Bernoulli response must be 0/1");
    }
    if (kind == Likelihood::gamma || kind == Likelihood::gp) {
        for (int i = 0; i < n(); ++i)
            if (!(y[i] > 0.0))
                throw data_error("sub-model: response must be strictly positive");
    }
}

namespace detail {

double xi_from_raw(double raw, double lo, double hi) { return lo + (hi - lo) * inv_logit(raw); }

double raw_from_xi(double xi, double lo, double hi) {
    double t = (xi - lo) / (hi - lo);
    t = std::clamp(t, 1e-12, 1.0 - 1e-12);
    return std::log(t / (1.0 - t));
}

HyperLayout hyper_layout(const SubModelSpec& spec) {
    HyperLayout l;
    l.field = spec.has_field();
    int next = l.field ? 2 : 0;
    if (spec.kind == Likelihood::gamma) l.idx_phi = next++;
    if (spec.kind == Likelihood::gp) l.idx_xi = next++;
    l.dim = next;
    return l;
}

Eigen::VectorXd initial_theta(const SubModelSpec& spec) {
    HyperLayout l = hyper_layout(spec);
    Eigen::VectorXd theta(l.dim);
    if (l.field) {
        double kappa = kappa_from_range(spec.prior_anchor.range);
        theta[0] = std::log(kappa);
        theta[1] = std::log(tau_from(kappa, spec.prior_anchor.sd));
    }
    if (l.idx_phi >= 0) theta[l.idx_phi] = std::log(spec.phi_init);
    if (l.idx_xi >= 0) theta[l.idx_xi] = raw_from_xi(spec.xi_init, spec.xi_lo, spec.xi_hi);
    return theta;
}

void Objective::set_theta(const Eigen::VectorXd& theta) {
    const SubModelSpec& s = *spec;
    log_hyper_prior = 0.0;
    if (layout.field) {
        prec = spde_precision_internal(s.fem, theta[0], theta[1]);
        double kappa0 = kappa_from_range(s.prior_anchor.range);
        double mu_lk = std::log(kappa0);
        double mu_lt = std::log(tau_from(kappa0, s.prior_anchor.sd));
        double sd = s.hyper_prior_sd;
        log_hyper_prior += -0.5 * ((theta[0] - mu_lk) * (theta[0] - mu_lk) +
                                   (theta[1] - mu_lt) * (theta[1] - mu_lt)) /
                               (sd * sd) -
                           std::log(2.0 * M_PI * sd * sd);
    }
    if (layout.idx_phi >= 0) {
        phi = std::exp(theta[layout.idx_phi]);
        double lp = theta[layout.idx_phi];
        log_hyper_prior += -0.5 * lp * lp - 0.5 * kLog2Pi;  // log phi ~ N(0, 1)
    }
    if (layout.idx_xi >= 0) xi = xi_from_raw(theta[layout.idx_xi], s.xi_lo, s.xi_hi);
}

double Objective::joint(const Eigen::VectorXd& u) const {
    const SubModelSpec& s = *spec;
    const int m = s.m(), nf = s.n_field();
    Eigen::VectorXd beta = u.head(m);
    double lp = 0.0;

    Eigen::VectorXd eta = s.x * beta;
    if (nf > 0) eta += s.a * u.tail(nf);

    for (int i = 0; i < s.n(); ++i) {
        switch (s.kind) {
            case Likelihood::gaussian: {
                double r = s.y[i] - eta[i];
                double v = s.gauss_noise_sd * s.gauss_noise_sd;
                lp += -0.5 * kLog2Pi - 0.5 * std::log(v) - 0.5 * r * r / v;
                break;
            }
            case Likelihood::bernoulli:
                lp += bernoulli_logit_loglik(static_cast<int>(s.y[i]), eta[i]).value;
                break;
            case Likelihood::gamma:
                lp += gamma_loglik(s.y[i], eta[i], phi).value;
                break;
            case Likelihood::gp: {
                GpLogLik g = gp_loglik(s.y[i], eta[i], xi);
                if (!g.valid) return -std::numeric_limits<double>::infinity();
                lp += g.value;
                break;
            }
        }
    }

    double pv = s.beta_prior_sd * s.beta_prior_sd;
    lp += -0.5 * m * (kLog2Pi + std::log(pv)) - 0.5 * beta.squaredNorm() / pv;
    if (nf > 0) lp += gaussian_log_density(u.tail(nf), prec);
    return lp;
}

Eigen::VectorXd Objective::newton_mode(Eigen::VectorXd u,
                                       Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>& chol,
                                       double* half_log_det, int* iters) const {
    const SubModelSpec& s = *spec;
    const int m = s.m(), nf = s.n_field(), nl = m + nf;
    const double prior_prec_beta = 1.0 / (s.beta_prior_sd * s.beta_prior_sd);

    double f = joint(u);
    if (!std::isfinite(f)) throw numeric_error("newton: infeasible starting point");

    std::vector<Eigen::Triplet<double>> trips;
    double gnorm_last = std::numeric_limits<double>::infinity();
    bool converged = false;
    int it = 0;
    for (; it < s.max_newton; ++it) {
        Eigen::VectorXd eta = s.x * u.head(m);
        if (nf > 0) eta += s.a * u.tail(nf);

        Eigen::VectorXd g1(s.n()), neg_d2(s.n());
        for (int i = 0; i < s.n(); ++i) {
            LogLik ll;
            switch (s.kind) {
                case Likelihood::gaussian: {
                    double v = s.gauss_noise_sd * s.gauss_noise_sd;
                    ll.d1 = (s.y[i] - eta[i]) / v;
                    ll.d2 = -1.0 / v;
                    break;
                }
                case Likelihood::bernoulli:
                    ll = bernoulli_logit_loglik(static_cast<int>(s.y[i]), eta[i]);
                    break;
                case Likelihood::gamma:
                    ll = gamma_loglik(s.y[i], eta[i], phi);
                    break;
                case Likelihood::gp: {
                    GpLogLik g = gp_loglik(s.y[i], eta[i], xi);
                    ll.d1 = g.d1;
                    ll.d2 = g.d2;
                    break;
                }
            }
            g1[i] = ll.d1;
            neg_d2[i] = -ll.d2;
        }

        // grad = J' g - P u with J = [X A], P = blockdiag(I/pv, Q)
        Eigen::VectorXd grad(nl);
        grad.head(m) = s.x.transpose() * g1 - prior_prec_beta * u.head(m);
        if (nf > 0) grad.tail(nf) = s.a.transpose() * g1 - prec.q * u.tail(nf);

        // H = J' W J + P, W = diag(-d2)
        trips.clear();
        Eigen::MatrixXd xtwx = s.x.transpose() * neg_d2.asDiagonal() * s.x;
        for (int r = 0; r < m; ++r) {
            for (int c = 0; c < m; ++c) {
                double v = xtwx(r, c) + (r == c ? prior_prec_beta : 0.0);
                trips.emplace_back(r, c, v);
            }
        }
        if (nf > 0) {
            Eigen::MatrixXd xtwa = s.x.transpose() * neg_d2.asDiagonal() * s.a;
            for (int r = 0; r < m; ++r)
                for (int c = 0; c < nf; ++c) {
                    trips.emplace_back(r, m + c, xtwa(r, c));
                    trips.emplace_back(m + c, r, xtwa(r, c));
                }
            Eigen::SparseMatrix<double> atwa =
                s.a.transpose() * neg_d2.asDiagonal() * s.a;
            Eigen::SparseMatrix<double> field_block = atwa + prec.q;
            for (int k = 0; k < field_block.outerSize(); ++k)
                for (Eigen::SparseMatrix<double>::InnerIterator jt(field_block, k); jt; ++jt)
                    trips.emplace_back(m + static_cast<int>(jt.row()),
                                       m + static_cast<int>(jt.col()), jt.value());
        }
        Eigen::SparseMatrix<double> hess(nl, nl);
        hess.setFromTriplets(trips.begin(), trips.end());

        chol.compute(hess);
        if (chol.info() != Eigen::Success)
            throw numeric_error("newton: curvature not positive definite");

        double gnorm = grad.lpNorm<Eigen::Infinity>();
        gnorm_last = gnorm;
        if (gnorm < s.newton_tol) {
            converged = true;
            break;
        }

        Eigen::VectorXd step = chol.solve(grad);
        double t = 1.0;
        for (int ls = 0; ls < 30; ++ls) {
            double f_try = joint(u + t * step);
            if (f_try >= f - 1e-12) {
                u += t * step;
                f = f_try;
                break;
            }
            t *= 0.5;
            if (ls == 29)
                throw numeric_error("newton: line search failed after max halvings");
        }
        // rounding-limited: the mode is pinned even if the gradient tolerance
        // is unreachable under this curvature scale
        if (t * step.lpNorm<Eigen::Infinity>() <
            1e-9 * (1.0 + u.lpNorm<Eigen::Infinity>())) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw numeric_error("newton: no convergence after " + std::to_string(s.max_newton) +
                            " iterations (|grad| = " + std::to_string(gnorm_last) + ")");

    if (half_log_det) {
        double ld = 0.0;
        Eigen::SparseMatrix<double> l(chol.matrixL());
        for (int i = 0; i < nl; ++i) ld += std::log(l.coeff(i, i));
        *half_log_det = ld;
    }
    if (iters) *iters = it;
    return u;
}

double Objective::laplace_objective(Eigen::VectorXd& u_warm) const {
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> chol;
    double half_log_det = 0.0;
    u_warm = newton_mode(u_warm, chol, &half_log_det, nullptr);
    const int nl = spec->n_latent();
    return joint(u_warm) + 0.5 * nl * kLog2Pi - half_log_det + log_hyper_prior;
}

}  // namespace detail

namespace {

using detail::HyperLayout;
using detail::Objective;

// Coordinate search with quadratic refinement; returns the maximizer.
Eigen::VectorXd maximize_outer(Objective& obj, Eigen::VectorXd theta, Eigen::VectorXd& u_warm,
                               const SubModelSpec& spec) {
    const int d = static_cast<int>(theta.size());
    if (d == 0 || !spec.optimize_hypers) {
        obj.set_theta(theta);
        return theta;
    }

    auto eval = [&](const Eigen::VectorXd& t) {
        obj.set_theta(t);
        return obj.laplace_objective(u_warm);
    };

    Eigen::VectorXd h = Eigen::VectorXd::Constant(d, 0.5);
    double f0 = eval(theta);
    for (int sweep = 0; sweep < spec.max_outer_sweeps; ++sweep) {
        bool improved = false;
        for (int k = 0; k < d; ++k) {
            Eigen::VectorXd tp = theta, tm = theta;
            tp[k] += h[k];
            tm[k] -= h[k];
            double fp = eval(tp), fm = eval(tm);

            double delta;
            double denom = 2.0 * f0 - fp - fm;
            if (fp <= f0 && fm <= f0 && denom > 1e-14) {
                delta = 0.5 * h[k] * (fp - fm) / denom;  // quadratic vertex
            } else {
                delta = (fp > fm) ? h[k] : -h[k];
            }
            delta = std::clamp(delta, -2.0 * h[k], 2.0 * h[k]);

            Eigen::VectorXd tt = theta;
            tt[k] += delta;
            double ft = (delta == h[k]) ? fp : (delta == -h[k]) ? fm : eval(tt);
            if (ft > f0 + 1e-12) {
                theta = tt;
                f0 = ft;
                improved = true;
                h[k] = std::max(std::min(2.0 * std::abs(delta), 1.0), spec.outer_tol);
            }
        }
        if (!improved) {
            h *= 0.35;
            if (h.maxCoeff() < spec.outer_tol) break;
        }
    }
    obj.set_theta(theta);
    return theta;
}

// Negative inverse of the numeric Hessian of the outer objective.
Eigen::MatrixXd outer_covariance(Objective& obj, const Eigen::VectorXd& theta,
                                 Eigen::VectorXd u_warm, std::vector<std::string>& flags) {
    const int d = static_cast<int>(theta.size());
    if (d == 0) return Eigen::MatrixXd();
    const double h = 0.1;

    auto eval = [&](const Eigen::VectorXd& t) {
        obj.set_theta(t);
        Eigen::VectorXd u = u_warm;
        return obj.laplace_objective(u);
    };

    double f0 = eval(theta);
    Eigen::MatrixXd hess(d, d);
    for (int i = 0; i < d; ++i) {
        Eigen::VectorXd tp = theta, tm = theta;
        tp[i] += h;
        tm[i] -= h;
        hess(i, i) = (eval(tp) - 2.0 * f0 + eval(tm)) / (h * h);
        for (int j = i + 1; j < d; ++j) {
            Eigen::VectorXd tpp = theta, tpm = theta, tmp = theta, tmm = theta;
            tpp[i] += h;
            tpp[j] += h;
            tpm[i] += h;
            tpm[j] -= h;
            tmp[i] -= h;
            tmp[j] += h;
            tmm[i] -= h;
            tmm[j] -= h;
            double v = (eval(tpp) - eval(tpm) - eval(tmp) + eval(tmm)) / (4.0 * h * h);
            hess(i, j) = hess(j, i) = v;
        }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(-hess);
    Eigen::VectorXd ev = es.eigenvalues();
    bool clamped = false;
    for (int i = 0; i < d; ++i)
        if (ev[i] < 1e-8) {
            ev[i] = 1e-8;
            clamped = true;
        }
    if (clamped) flags.push_back("hyper curvature not positive definite; flat directions clamped");
    return es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
}

std::vector<ParamSummary> hyper_user_summaries(const SubModelSpec& spec,
                                               const Eigen::VectorXd& theta,
                                               const Eigen::MatrixXd& cov) {
    HyperLayout layout = detail::hyper_layout(spec);
    std::vector<ParamSummary> out;
    if (layout.field) {
        // log range = log sqrt8 - log kappa and
        // log sd = -log sqrt(4 pi) - log kappa - log tau are linear in theta.
        double mu_r = 0.5 * std::log(8.0) - theta[0];
        out.push_back(lognormal_summary("field_range", mu_r, cov(0, 0)));
        double mu_s = -0.5 * std::log(4.0 * M_PI) - theta[0] - theta[1];
        double var_s = cov(0, 0) + cov(1, 1) + 2.0 * cov(0, 1);
        out.push_back(lognormal_summary("field_sd", mu_s, var_s));
    }
    if (layout.idx_phi >= 0) {
        int i = layout.idx_phi;
        out.push_back(lognormal_summary("gamma_shape", theta[i], cov(i, i)));
    }
    if (layout.idx_xi >= 0) {
        int i = layout.idx_xi;
        double mu = theta[i], sig = std::sqrt(std::max(cov(i, i), 0.0));
        // mean/sd of the transformed shape by quadrature over the raw marginal
        double m1 = 0.0, m2 = 0.0, wsum = 0.0;
        const int npts = 201;
        for (int k = 0; k < npts; ++k) {
            double z = -6.0 + 12.0 * k / (npts - 1);
            double w = std::exp(-0.5 * z * z);
            double v = detail::xi_from_raw(mu + sig * z, spec.xi_lo, spec.xi_hi);
            m1 += w * v;
            m2 += w * v * v;
            wsum += w;
        }
        m1 /= wsum;
        m2 /= wsum;
        ParamSummary s;
        s.name = "gp_shape";
        s.mean = m1;
        s.sd = std::sqrt(std::max(m2 - m1 * m1, 0.0));
        s.q025 = detail::xi_from_raw(mu - kZ975 * sig, spec.xi_lo, spec.xi_hi);
        s.q50 = detail::xi_from_raw(mu, spec.xi_lo, spec.xi_hi);
        s.q975 = detail::xi_from_raw(mu + kZ975 * sig, spec.xi_lo, spec.xi_hi);
        out.push_back(s);
    }
    return out;
}

}  // namespace

SubModelFit fit_laplace(const SubModelSpec& spec) {
    spec.validate();
    const int m = spec.m(), nf = spec.n_field(), nl = m + nf;

    Objective obj;
    obj.spec = &spec;
    obj.layout = detail::hyper_layout(spec);

    Eigen::VectorXd u_warm = Eigen::VectorXd::Zero(nl);
    Eigen::VectorXd theta = detail::initial_theta(spec);
    theta = maximize_outer(obj, theta, u_warm, spec);

    SubModelFit fit;
    fit.kind = spec.kind;
    fit.n_fixed = m;
    fit.n_field = nf;
    fit.xi_lo = spec.xi_lo;
    fit.xi_hi = spec.xi_hi;
    fit.names = spec.names;
    fit.theta = theta;

    obj.set_theta(theta);
    auto chol = std::make_shared<Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>>();
    double half_log_det = 0.0;
    fit.mode = obj.newton_mode(u_warm, *chol, &half_log_det, nullptr);
    fit.hess_chol = chol;
    fit.post.log_marginal =
        obj.joint(fit.mode) + 0.5 * nl * kLog2Pi - half_log_det + obj.log_hyper_prior;

    fit.theta_cov = outer_covariance(obj, theta, fit.mode, fit.post.flags);
    obj.set_theta(theta);

    Eigen::VectorXd sd = inverse_diagonal(*chol, nl).cwiseMax(0.0).cwiseSqrt();
    for (int j = 0; j < m; ++j)
        fit.post.fixed.push_back(gaussian_summary(spec.names[j], fit.mode[j], sd[j]));
    fit.post.w_mean = fit.mode.tail(nf);
    fit.post.w_sd = sd.tail(nf);
    fit.post.hyper = hyper_user_summaries(spec, theta, fit.theta_cov);
    return fit;
}

double quantile(std::vector<double> draws, double p) {
    if (draws.empty()) throw usage_error("quantile: empty draws");
    std::sort(draws.begin(), draws.end());
    double h = (static_cast<double>(draws.size()) - 1.0) * p;
    size_t lo = static_cast<size_t>(std::floor(h));
    size_t hi = std::min(lo + 1, draws.size() - 1);
    return draws[lo] + (h - std::floor(h)) * (draws[hi] - draws[lo]);
}

ParamSummary summarize_draws(const std::string& name, std::vector<double> draws) {
    if (draws.empty()) throw usage_error("summarize_draws: empty draws");
    ParamSummary s;
    s.name = name;
    double n = static_cast<double>(draws.size());
    double mean = 0.0;
    for (double v : draws) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : draws) ss += (v - mean) * (v - mean);
    s.mean = mean;
    s.sd = draws.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    std::sort(draws.begin(), draws.end());
    auto q = [&](double p) {
        double h = (n - 1.0) * p;
        size_t lo = static_cast<size_t>(std::floor(h));
        size_t hi = std::min(lo + 1, draws.size() - 1);
        return draws[lo] + (h - std::floor(h)) * (draws[hi] - draws[lo]);
    };
    s.q025 = q(0.025);
    s.q50 = q(0.5);
    s.q975 = q(0.975);
    return s;
}

PosteriorApprox posterior_summary(const std::vector<std::string>& names,
                                  const Eigen::MatrixXd& chains) {
    if (chains.rows() == 0) throw usage_error("posterior_summary: empty chains");
    if (static_cast<int>(names.size()) != chains.cols())
        throw usage_error("posterior_summary: name count does not match parameter count");
    PosteriorApprox out;
    for (int j = 0; j < chains.cols(); ++j) {
        std::vector<double> col(chains.rows());
        for (int i = 0; i < chains.rows(); ++i) col[i] = chains(i, j);
        ParamSummary s = summarize_draws(names[j], std::move(col));
        if (s.sd == 0.0) out.flags.push_back("degenerate draws for " + s.name);
        out.fixed.push_back(s);
    }
    return out;
}

Eigen::MatrixXd SubModelFit::sample_latent(int ndraws, std::uint64_t seed) const {
    const int nl = n_fixed + n_field;
    Eigen::MatrixXd out(nl, ndraws);
    if (latent_draws.cols() > 0) {
        const int stored = static_cast<int>(latent_draws.cols());
        for (int k = 0; k < ndraws; ++k) {
            int idx = (ndraws <= stored) ? static_cast<int>(static_cast<long>(k) * stored / ndraws)
                                         : k % stored;
            out.col(k) = latent_draws.col(idx);
        }
        return out;
    }
    Rng rng(seed);
    Eigen::VectorXd z(nl);
    for (int k = 0; k < ndraws; ++k) {
        for (int i = 0; i < nl; ++i) z[i] = rng.normal();
        Eigen::VectorXd v = hess_chol->matrixU().solve(z);
        out.col(k) = mode + hess_chol->permutationPinv() * v;
    }
    return out;
}

Eigen::MatrixXd SubModelFit::sample_hyper(int ndraws, std::uint64_t seed) const {
    const int d = static_cast<int>(theta.size());
    Eigen::MatrixXd out(d, ndraws);
    if (d == 0) return out;
    if (hyper_draws.cols() > 0) {
        const int stored = static_cast<int>(hyper_draws.cols());
        for (int k = 0; k < ndraws; ++k) {
            int idx = (ndraws <= stored) ? static_cast<int>(static_cast<long>(k) * stored / ndraws)
                                         : k % stored;
            out.col(k) = hyper_draws.col(idx);
        }
        return out;
    }
    // PSD square root (covariance may be singular, e.g. fixed hypers)
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(theta_cov);
    Eigen::MatrixXd l =
        es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
    Rng rng(seed ^ 0x5bf0a8b1u);
    Eigen::VectorXd z(d);
    for (int k = 0; k < ndraws; ++k) {
        for (int i = 0; i < d; ++i) z[i] = rng.normal();
        out.col(k) = theta + l * z;
    }
    return out;
}

double SubModelFit::xi_of(const Eigen::VectorXd& theta_point) const {
    // xi_raw sits in the last slot for gp sub-models
    return detail::xi_from_raw(theta_point[theta_point.size() - 1], xi_lo, xi_hi);
}

}  // namespace zigp
