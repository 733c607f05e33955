#pragma once

namespace zigp {

// Observation log-likelihood value with derivatives in the linear predictor.
// d1/d2 are first and second derivatives; every family below is log-concave
// in its predictor, so d2 <= 0 everywhere.
struct LogLik {
    double value = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
    bool valid = true;
};

// log(1 + e^x) without overflow.
double log1pexp(double x);
// logistic function, stable for large |x|.
double inv_logit(double x);

// Bernoulli with logit link: eta = logit(p).
LogLik bernoulli_logit_loglik(int z, double eta);

// Gamma with log-mean link: mean mu = e^eta, shape a = phi, rate b = phi/mu.
LogLik gamma_loglik(double y, double eta, double phi);

// GP scale from the median: sigma = xi * q50 / (2^xi - 1), continuous at
// xi = 0 where it tends to q50 / log 2.
double sigma_from_median(double q50, double xi);

// Generalized Pareto density of an exceedance y > 0 with median link
// q50 = e^(q_eta); d1/d2 are in q_eta, d_xi is the shape derivative.
// valid = false signals a support violation (only possible for xi < 0).
struct GpLogLik {
    double value = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
    double d_xi = 0.0;
    bool valid = true;
};
GpLogLik gp_loglik(double y, double q_eta, double xi);

// GP distribution function and quantiles for scale sigma, shape xi.
double gp_cdf(double y, double sigma, double xi);
double gp_quantile(double p, double sigma, double xi);

}  // namespace zigp
