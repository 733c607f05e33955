#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace zigp {

// Seeded random generator with fully specified transforms.
//
// The bit stream is std::mt19937_64 (portable by the standard); uniform,
// normal and gamma variates are produced by explicit algorithms below
// (rather than std::*_distribution, whose algorithms are unspecified), so a
// given seed yields the same draws on every platform with the same libm.
// Box-Muller for normals, Marsaglia-Tsang for gammas.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t raw() { return gen_(); }

    // Uniform on the open interval (0, 1).
    double uniform() {
        return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller; the paired variate is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    bool bernoulli(double p) { return uniform() < p; }

    // Gamma(shape, 1). Marsaglia-Tsang squeeze for shape >= 1, boosted for
    // shape < 1 by Gamma(a) = Gamma(a+1) * U^(1/a).
    double gamma(double shape) {
        if (shape < 1.0) {
            double u = uniform();
            return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        double d = shape - 1.0 / 3.0;
        double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            double u = uniform();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    // Gamma with shape a and rate b (mean a/b).
    double gamma(double shape, double rate) { return gamma(shape) / rate; }

private:
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace zigp
