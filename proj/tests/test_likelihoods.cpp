#include <doctest.h>

#include <cmath>
#include <limits>

#include "zigp/likelihoods.hpp"
#include "zigp/rng.hpp"

using namespace zigp;

TEST_CASE("bernoulli logit closed forms") {
    LogLik a = bernoulli_logit_loglik(1, 0.0);
    CHECK(a.value == doctest::Approx(std::log(0.5)).epsilon(1e-12));
    CHECK(a.d1 == doctest::Approx(0.5).epsilon(1e-12));

    LogLik b = bernoulli_logit_loglik(0, 0.0);
    CHECK(b.value == doctest::Approx(std::log(0.5)).epsilon(1e-12));
    CHECK(b.d1 == doctest::Approx(-0.5).epsilon(1e-12));

    LogLik c = bernoulli_logit_loglik(1, -40.0);
    CHECK(std::isfinite(c.value));
    CHECK(c.value == doctest::Approx(-40.0).epsilon(1e-9));

    LogLik d = bernoulli_logit_loglik(0, 800.0);  // no overflow
    CHECK(std::isfinite(d.value));
}

TEST_CASE("gamma log likelihood closed forms and sampling oracle") {
    // phi = 1, eta = 0 is Exponential(1)
    CHECK(gamma_loglik(1.0, 0.0, 1.0).value == doctest::Approx(-1.0).epsilon(1e-12));

    // coded (a, b) satisfies a/b = e^eta exactly
    double eta = 0.37, phi = 1.9;
    double a = phi, b = phi * std::exp(-eta);
    CHECK(a / b == doctest::Approx(std::exp(eta)).epsilon(1e-14));

    // Monte Carlo mean of the coded distribution equals e^eta
    Rng rng(5150);
    double mean = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) mean += rng.gamma(2.0, 2.0 * std::exp(-1.2));
    mean /= n;
    CHECK(mean == doctest::Approx(std::exp(1.2)).epsilon(0.01));

    // gradient vs central difference
    double h = 1e-6;
    LogLik g = gamma_loglik(2.0, 0.3, 1.7);
    double fd = (gamma_loglik(2.0, 0.3 + h, 1.7).value - gamma_loglik(2.0, 0.3 - h, 1.7).value) /
                (2 * h);
    CHECK(g.d1 == doctest::Approx(fd).epsilon(1e-6));

    CHECK_THROWS(gamma_loglik(-1.0, 0.0, 1.0));
    CHECK_THROWS(gamma_loglik(0.0, 0.0, 1.0));
}

TEST_CASE("sigma from median closed forms") {
    CHECK(sigma_from_median(1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-14));

    double s = sigma_from_median(10.0, 0.5);
    CHECK(s == doctest::Approx(12.0710678).epsilon(1e-6));
    // quantile oracle: the median of GP(s, 0.5) is 10
    CHECK(gp_cdf(10.0, s, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(gp_quantile(0.5, s, 0.5) == doctest::Approx(10.0).epsilon(1e-12));

    CHECK(sigma_from_median(1.0, 1e-9) ==
          doctest::Approx(1.0 / std::log(2.0)).epsilon(1e-6));
    CHECK(sigma_from_median(1.0, 0.0) == doctest::Approx(1.0 / std::log(2.0)).epsilon(1e-14));
    CHECK_THROWS(sigma_from_median(-2.0, 0.3));
}

TEST_CASE("gp median identity on a parameter grid") {
    for (int i = 0; i < 20; ++i) {
        for (int j = 0; j < 20; ++j) {
            double q50 = 0.1 + (100.0 - 0.1) * i / 19.0;
            double xi = 0.5 * (j + 1) / 20.0;
            double sigma = sigma_from_median(q50, xi);
            CHECK(std::abs(gp_cdf(q50, sigma, xi) - 0.5) < 1e-10);
        }
    }
}

TEST_CASE("gp log likelihood limits, integration, gradients") {
    // exponential limit as xi -> 0
    double q_eta = 0.4;
    double v_small = gp_loglik(2.0, q_eta, 1e-9).value;
    double sigma0 = std::exp(q_eta) / std::log(2.0);
    double v_exp = -std::log(sigma0) - 2.0 / sigma0;
    CHECK(v_small == doctest::Approx(v_exp).epsilon(1e-6));

    // density integrates to one (composite Simpson, q50 = 5, xi = 0.3)
    {
        double q = std::log(5.0), xi = 0.3;
        const double upper = 5000.0;
        const int steps = 1 << 21;
        double h = upper / steps;
        auto dens = [&](double y) { return y <= 0.0 ? 0.0 : std::exp(gp_loglik(y, q, xi).value); };
        double acc = dens(1e-300) + dens(upper);
        for (int k = 1; k < steps; ++k) acc += dens(k * h) * (k % 2 == 1 ? 4.0 : 2.0);
        double integral = acc * h / 3.0;
        CHECK(integral == doctest::Approx(1.0).epsilon(1e-6));
    }

    // gradients vs central differences at the spec point
    {
        double y = 3.0, q = 1.0, xi = 0.2, h = 1e-6;
        GpLogLik g = gp_loglik(y, q, xi);
        double fd_q = (gp_loglik(y, q + h, xi).value - gp_loglik(y, q - h, xi).value) / (2 * h);
        double fd_xi = (gp_loglik(y, q, xi + h).value - gp_loglik(y, q, xi - h).value) / (2 * h);
        double fd_qq = (gp_loglik(y, q + h, xi).d1 - gp_loglik(y, q - h, xi).d1) / (2 * h);
        CHECK(g.d1 == doctest::Approx(fd_q).epsilon(1e-5));
        CHECK(g.d_xi == doctest::Approx(fd_xi).epsilon(1e-5));
        CHECK(g.d2 == doctest::Approx(fd_qq).epsilon(1e-5));
    }

    // support violation for negative shape
    GpLogLik bad = gp_loglik(100.0, 0.0, -0.3);
    CHECK_FALSE(bad.valid);
    CHECK(bad.value == -std::numeric_limits<double>::infinity());
}

TEST_CASE("randomized gradient checks across the parameter space") {
    Rng rng(8888);
    const double h = 1e-5;
    for (int k = 0; k < 100; ++k) {
        double eta = rng.uniform(-2.0, 2.0);

        // bernoulli
        int z = rng.bernoulli(0.5) ? 1 : 0;
        double fd = (bernoulli_logit_loglik(z, eta + h).value -
                     bernoulli_logit_loglik(z, eta - h).value) /
                    (2 * h);
        double an = bernoulli_logit_loglik(z, eta).d1;
        CHECK(std::abs(fd - an) < 1e-4 * std::max(1.0, std::abs(an)));

        // gamma
        double y = rng.uniform(0.1, 6.0), phi = rng.uniform(0.4, 4.0);
        fd = (gamma_loglik(y, eta + h, phi).value - gamma_loglik(y, eta - h, phi).value) /
             (2 * h);
        an = gamma_loglik(y, eta, phi).d1;
        CHECK(std::abs(fd - an) < 1e-4 * std::max(1.0, std::abs(an)));

        // gp in both arguments
        double xi = rng.uniform(0.05, 0.45);
        fd = (gp_loglik(y, eta + h, xi).value - gp_loglik(y, eta - h, xi).value) / (2 * h);
        an = gp_loglik(y, eta, xi).d1;
        CHECK(std::abs(fd - an) < 1e-4 * std::max(1.0, std::abs(an)));
        fd = (gp_loglik(y, eta, xi + h).value - gp_loglik(y, eta, xi - h).value) / (2 * h);
        an = gp_loglik(y, eta, xi).d_xi;
        CHECK(std::abs(fd - an) < 1e-4 * std::max(1.0, std::abs(an)));
    }
}
