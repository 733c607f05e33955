#include "zigp/likelihoods.hpp"

#include <cmath>
#include <limits>

#include "zigp/errors.hpp"

namespace zigp {

double log1pexp(double x) {
    if (x > 0.0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

double inv_logit(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
}

LogLik bernoulli_logit_loglik(int z, double eta) {
    if (z != 0 && z != 1) throw usage_error("bernoulli_logit_loglik: z must be 0 or 1");
    LogLik out;
    out.value = z * eta - log1pexp(eta);
    double p = inv_logit(eta);
    out.d1 = z - p;
    out.d2 = -p * (1.0 - p);
    return out;
}

LogLik gamma_loglik(double y, double eta, double phi) {
    if (!(y > 0.0)) throw data_error("gamma_loglik: response must be positive");
    if (!(phi > 0.0)) throw usage_error("gamma_loglik: shape must be positive");
    LogLik out;
    // log Gamma(y; a = phi, b = phi e^-eta)
    //   = phi (log phi - eta) - lgamma(phi) + (phi - 1) log y - phi y e^-eta
    double y_over_mu = y * std::exp(-eta);
    out.value = phi * (std::log(phi) - eta) - std::lgamma(phi) + (phi - 1.0) * std::log(y) -
                phi * y_over_mu;
    out.d1 = phi * (y_over_mu - 1.0);
    out.d2 = -phi * y_over_mu;
    return out;
}

double sigma_from_median(double q50, double xi) {
    if (!(q50 > 0.0)) throw usage_error("sigma_from_median: median must be positive");
    if (xi == 0.0) return q50 / std::log(2.0);
    // 0.5^-xi - 1 = expm1(xi log 2)
    return xi * q50 / std::expm1(xi * std::log(2.0));
}

GpLogLik gp_loglik(double y, double q_eta, double xi) {
    if (!(y > 0.0)) throw data_error("gp_loglik: exceedance must be positive");
    GpLogLik out;

    const double ln2 = std::log(2.0);
    const double m = std::exp(q_eta);
    const double sigma = sigma_from_median(m, xi);

    if (xi == 0.0) {  // exponential limit, shape derivative left to the caller
        out.value = -std::log(sigma) - y / sigma;
        out.d1 = -1.0 + y / sigma;
        out.d2 = -y / sigma;
        out.d_xi = 0.0;
        return out;
    }

    if (xi < 0.0 && y >= -sigma / xi) {
        out.valid = false;
        out.value = -std::numeric_limits<double>::infinity();
        return out;
    }

    const double u = xi * y / sigma;
    const double l1p = std::log1p(u);
    out.value = -std::log(sigma) - (1.0 + 1.0 / xi) * l1p;

    // sigma = c(xi) e^(q_eta), so dsigma/dq_eta = sigma and
    // d logf / d q_eta = -1 + (1 + xi) y / (sigma + xi y).
    const double denom = sigma + xi * y;
    out.d1 = -1.0 + (1.0 + xi) * y / denom;
    out.d2 = -(1.0 + xi) * y * sigma / (denom * denom);

    // Shape derivative; sigma'(xi) = sigma (1/xi - ln2 / (1 - 2^-xi)).
    const double em = std::expm1(xi * ln2);  // 2^xi - 1
    const double ds = sigma * (1.0 / xi - ln2 * (1.0 + 1.0 / em));
    const double du_dxi = (y / sigma) * (1.0 - xi * ds / sigma);
    out.d_xi = -ds / sigma + l1p / (xi * xi) - (1.0 + 1.0 / xi) * du_dxi / (1.0 + u);
    return out;
}

double gp_cdf(double y, double sigma, double xi) {
    if (y <= 0.0) return 0.0;
    if (xi == 0.0) return -std::expm1(-y / sigma);
    double u = 1.0 + xi * y / sigma;
    if (u <= 0.0) return 1.0;  // above the upper endpoint for xi < 0
    return -std::expm1(-std::log(u) / xi);
}

double gp_quantile(double p, double sigma, double xi) {
    if (!(p >= 0.0 && p < 1.0)) throw usage_error("gp_quantile: p must be in [0, 1)");
    if (xi == 0.0) return -sigma * std::log1p(-p);
    return sigma * std::expm1(-xi * std::log1p(-p)) / xi;
}

}  // namespace zigp
