#pragma once

// One-stage optimal transmission scheduling and affine channel coding for a
// Laplace source observed through an additive Gamma-noise channel with a
// noiseless one-bit sign side channel.
//
// With communication priced at c per use, the optimal scheduler transmits
// iff |x| exceeds sqrt(c + m), where m = 1/((gamma+1) lambda^2) is the
// conditional MSE the affine encoder/decoder pair achieves on transmitted
// samples. Both the dynamic-programming solver and the rollout simulator are
// built on these maps.

#include <cmath>
#include <optional>
#include <stdexcept>

#include "restim/distributions.hpp"

namespace restim {

// Source rate lambda, noise shape k, transmit power P. The noise scale is
// pinned to sqrt(P), which makes the SNR gamma = P/(k theta^2) equal 1/k and
// keeps the affine coding scheme exactly optimal.
struct ModelParams {
    double rate;   // lambda > 0
    double shape;  // k > 0
    double power;  // P > 0

    void validate() const {
        if (!(rate > 0.0) || !std::isfinite(rate)) {
            throw std::invalid_argument("ModelParams: rate must be positive and finite");
        }
        if (!(shape > 0.0) || !std::isfinite(shape)) {
            throw std::invalid_argument("ModelParams: shape must be positive and finite");
        }
        if (!(power > 0.0) || !std::isfinite(power)) {
            throw std::invalid_argument("ModelParams: power must be positive and finite");
        }
    }

    double noise_scale() const { return std::sqrt(power); }            // theta
    double encoder_gain() const { return rate * std::sqrt(power); }    // alpha
    double snr() const { return 1.0 / shape; }                         // gamma
    double transmission_mmse() const {                                 // m
        return 1.0 / ((snr() + 1.0) * rate * rate);
    }
    double prior_variance() const { return 2.0 / (rate * rate); }

    LaplaceParams source() const { return LaplaceParams{rate}; }
    GammaParams noise() const { return GammaParams{shape, noise_scale()}; }

    static ModelParams from_rate_shape_power(double rate, double shape, double power) {
        ModelParams p{rate, shape, power};
        p.validate();
        return p;
    }

    // Convenience for sweeps parameterized by SNR: gamma = 1/k.
    static ModelParams from_snr(double rate, double snr, double power = 1.0) {
        if (!(snr > 0.0) || !std::isfinite(snr)) {
            throw std::invalid_argument("ModelParams: snr must be positive and finite");
        }
        return from_rate_shape_power(rate, 1.0 / snr, power);
    }
};

// A real channel value or the distinguished no-transmission symbol.
class ChannelSymbol {
  public:
    ChannelSymbol() = default;  // absent
    explicit ChannelSymbol(double value) : value_(value) {}

    static ChannelSymbol absent() { return ChannelSymbol{}; }

    bool is_absent() const { return !value_.has_value(); }
    bool is_present() const { return value_.has_value(); }

    double value() const {
        if (!value_) throw std::logic_error("ChannelSymbol: no value in absent symbol");
        return *value_;
    }

    friend bool operator==(const ChannelSymbol& a, const ChannelSymbol& b) {
        return a.value_ == b.value_;
    }

  private:
    std::optional<double> value_;
};

// Sign bit carried over the noiseless side channel; present exactly when the
// matching channel symbol is present.
class SideSymbol {
  public:
    SideSymbol() = default;  // absent

    static SideSymbol absent() { return SideSymbol{}; }

    static SideSymbol from_sign(double x) {
        SideSymbol s;
        s.sign_ = (x < 0.0) ? -1 : 1;  // sign(0) fixed as +1 for totality
        return s;
    }

    bool is_absent() const { return !sign_.has_value(); }
    bool is_present() const { return sign_.has_value(); }

    int sign() const {
        if (!sign_) throw std::logic_error("SideSymbol: no sign in absent symbol");
        return *sign_;
    }

    friend bool operator==(const SideSymbol& a, const SideSymbol& b) {
        return a.sign_ == b.sign_;
    }

  private:
    std::optional<int> sign_;
};

// Threshold minimizing the one-stage cost with communication price c.
inline double optimal_threshold(double comm_cost, const ModelParams& params) {
    params.validate();
    if (comm_cost < 0.0 || !std::isfinite(comm_cost)) {
        throw std::invalid_argument("optimal_threshold: comm_cost must be nonnegative and finite");
    }
    return std::sqrt(comm_cost + params.transmission_mmse());
}

// Transmit iff budget remains and the observation clears the threshold.
// The boundary |x| == beta does not transmit.
inline bool schedule(double x, double beta, int budget_remaining) {
    if (std::isnan(beta) || beta < 0.0) {
        throw std::invalid_argument("schedule: beta must be nonnegative");
    }
    return budget_remaining > 0 && std::abs(x) > beta;
}

// Affine encoder alpha |x| - alpha beta - alpha/lambda; passes the absent
// symbol through. Output is zero at the transmitted-tail mean beta + 1/lambda,
// and E[Y^2 | transmit] = alpha^2/lambda^2 = P meets the power budget with
// equality.
inline ChannelSymbol encode(const ChannelSymbol& observed, double beta, const ModelParams& params) {
    params.validate();
    if (!(beta > 0.0)) throw std::invalid_argument("encode: beta must be positive");
    if (observed.is_absent()) return ChannelSymbol::absent();
    const double x = observed.value();
    if (!(std::abs(x) > beta)) {
        throw std::invalid_argument("encode: scheduler contract violated, |x| <= beta");
    }
    const double a = params.encoder_gain();
    return ChannelSymbol(a * std::abs(x) - a * beta - a / params.rate);
}

// Affine decoder; absent input decodes to the prior mean 0. Presence of the
// noisy symbol and the side symbol must agree; a mismatch can only come from
// a pipeline bug upstream and is rejected rather than coerced.
inline double decode(const ChannelSymbol& received, const SideSymbol& side, double beta,
                     const ModelParams& params) {
    params.validate();
    if (received.is_present() != side.is_present()) {
        throw std::logic_error("decode: mixed presence of channel and side symbols");
    }
    if (received.is_absent()) return 0.0;
    if (!(beta > 0.0)) throw std::invalid_argument("decode: beta must be positive");
    const double shrink = params.snr() / (params.snr() + 1.0);
    const double magnitude =
        shrink * received.value() / params.encoder_gain() + shrink / params.rate + beta;
    return static_cast<double>(side.sign()) * magnitude;
}

// Expected one-stage cost of threshold beta at communication price c:
// E[X^2 1{|X|<=beta}] + (m + c) P(|X| > beta).
inline double stage_total_cost(double beta, double comm_cost, const ModelParams& params) {
    params.validate();
    if (!(beta > 0.0)) throw std::invalid_argument("stage_total_cost: beta must be positive");
    if (comm_cost < 0.0 || !std::isfinite(comm_cost)) {
        throw std::invalid_argument("stage_total_cost: comm_cost must be nonnegative and finite");
    }
    const LaplaceParams src = params.source();
    return laplace_truncated_second_moment(beta, src) +
           (params.transmission_mmse() + comm_cost) * laplace_tail_prob(beta, src);
}

// stage_total_cost evaluated at its minimizer sqrt(c + m), in the
// cancellation-free simplified form 2 lambda^-2 (1 - (lambda beta + 1) e^{-lambda beta}).
inline double optimal_stage_cost(double comm_cost, const ModelParams& params) {
    const double beta = optimal_threshold(comm_cost, params);
    const double lb = params.rate * beta;
    return params.prior_variance() * (1.0 - (lb + 1.0) * std::exp(-lb));
}

}  // namespace restim
