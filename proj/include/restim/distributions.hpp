#pragma once

// Laplace source and Gamma channel-noise distributions: exact densities,
// tail probabilities, truncated moments, and seeded samplers.
//
// All sampling goes through RngStream so that a (seed, stream) pair fully
// determines the sample sequence on every platform. The engine is the
// standard-specified mt19937_64; every distribution transform is implemented
// here rather than taken from <random>, whose distributions are
// implementation-defined.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>

namespace restim {

struct LaplaceParams {
    double rate;  // lambda > 0; density (lambda/2) exp(-lambda |x|), variance 2/lambda^2

    void validate() const {
        if (!(rate > 0.0) || !std::isfinite(rate)) {
            throw std::invalid_argument("LaplaceParams: rate must be positive and finite");
        }
    }
};

struct GammaParams {
    double shape;  // k > 0
    double scale;  // theta > 0; mean k*theta, variance k*theta^2

    void validate() const {
        if (!(shape > 0.0) || !std::isfinite(shape)) {
            throw std::invalid_argument("GammaParams: shape must be positive and finite");
        }
        if (!(scale > 0.0) || !std::isfinite(scale)) {
            throw std::invalid_argument("GammaParams: scale must be positive and finite");
        }
    }
};

// Reproducible random stream addressed by (seed, stream index).
// Distinct streams are independent for practical purposes and may be used
// concurrently; a single stream must not be shared across threads.
class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {
        std::seed_seq seq{
            static_cast<std::uint32_t>(seed & 0xffffffffu),
            static_cast<std::uint32_t>(seed >> 32),
            static_cast<std::uint32_t>(stream & 0xffffffffu),
            static_cast<std::uint32_t>(stream >> 32),
        };
        engine_.seed(seq);
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    std::uint64_t next_bits() { return engine_(); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
};

inline double laplace_pdf(double x, const LaplaceParams& p) {
    p.validate();
    return 0.5 * p.rate * std::exp(-p.rate * std::abs(x));
}

inline double laplace_cdf(double x, const LaplaceParams& p) {
    p.validate();
    if (x < 0.0) return 0.5 * std::exp(p.rate * x);
    return 1.0 - 0.5 * std::exp(-p.rate * x);
}

// P(|X| > beta) = exp(-lambda beta).
inline double laplace_tail_prob(double beta, const LaplaceParams& p) {
    p.validate();
    if (beta < 0.0) throw std::invalid_argument("laplace_tail_prob: beta must be nonnegative");
    return std::exp(-p.rate * beta);
}

// E[X^2 1{|X| <= beta}] = 2/lambda^2 - exp(-lambda beta) (beta^2 + 2 beta/lambda + 2/lambda^2).
inline double laplace_truncated_second_moment(double beta, const LaplaceParams& p) {
    p.validate();
    if (beta < 0.0) {
        throw std::invalid_argument("laplace_truncated_second_moment: beta must be nonnegative");
    }
    const double inv2 = 2.0 / (p.rate * p.rate);
    if (std::isinf(beta)) return inv2;
    return inv2 - std::exp(-p.rate * beta) * (beta * beta + 2.0 * beta / p.rate + inv2);
}

// Inverse-CDF sampler: u uniform on (-1/2, 1/2), X = -sgn(u) ln(1 - 2|u|) / lambda.
inline double sample_laplace(RngStream& rng, const LaplaceParams& p) {
    p.validate();
    for (;;) {
        const double u = rng.uniform01() - 0.5;
        const double w = 1.0 - 2.0 * std::abs(u);
        if (w <= 0.0) continue;  // u == -1/2 exactly
        const double mag = -std::log(w) / p.rate;
        return u < 0.0 ? -mag : mag;
    }
}

inline double sample_standard_normal(RngStream& rng) {
    // Marsaglia polar; the second variate of each accepted pair is discarded
    // so the sampler stays stateless beyond the engine.
    for (;;) {
        const double a = 2.0 * rng.uniform01() - 1.0;
        const double b = 2.0 * rng.uniform01() - 1.0;
        const double s = a * a + b * b;
        if (s >= 1.0 || s == 0.0) continue;
        return a * std::sqrt(-2.0 * std::log(s) / s);
    }
}

// Marsaglia-Tsang squeeze sampler. Shapes below one are handled by sampling
// at shape k+1 and scaling with U^{1/k}, which is exact.
inline double sample_gamma(RngStream& rng, const GammaParams& p) {
    p.validate();
    if (p.shape < 1.0) {
        const double boosted = sample_gamma(rng, GammaParams{p.shape + 1.0, p.scale});
        double u;
        do {
            u = rng.uniform01();
        } while (u == 0.0);
        return boosted * std::pow(u, 1.0 / p.shape);
    }
    const double d = p.shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = sample_standard_normal(rng);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform01();
        if (u < 1.0 - 0.0331 * (x * x) * (x * x)) return d * v * p.scale;
        if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
            return d * v * p.scale;
        }
    }
}

// Regularized lower incomplete gamma P(k, x/theta); series for small
// arguments, continued fraction otherwise.
inline double gamma_cdf(double x, const GammaParams& p) {
    p.validate();
    if (x <= 0.0) return 0.0;
    const double a = p.shape;
    const double z = x / p.scale;
    const double lg = std::lgamma(a);
    constexpr int kMaxIter = 500;
    constexpr double kEps = 1e-15;
    if (z < a + 1.0) {
        double term = 1.0 / a;
        double sum = term;
        double ap = a;
        for (int n = 0; n < kMaxIter; ++n) {
            ap += 1.0;
            term *= z / ap;
            sum += term;
            if (std::abs(term) < std::abs(sum) * kEps) break;
        }
        return sum * std::exp(-z + a * std::log(z) - lg);
    }
    // Lentz continued fraction for Q(a, z).
    constexpr double kTiny = 1e-300;
    double b = z + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEps) break;
    }
    return 1.0 - std::exp(-z + a * std::log(z) - lg) * h;
}

}  // namespace restim
