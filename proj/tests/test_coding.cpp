#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "restim/coding.hpp"
#include "restim/distributions.hpp"
#include "restim/oracles.hpp"
#include "restim/validation.hpp"
#include "test_support.hpp"

using namespace restim;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

ModelParams unit_snr1() { return ModelParams::from_snr(1.0, 1.0); }
}  // namespace

TEST_CASE("model parameter derivations") {
    const ModelParams p = ModelParams::from_rate_shape_power(2.0, 0.5, 4.0);
    CHECK(p.noise_scale() == 2.0);         // theta = sqrt(P)
    CHECK(p.encoder_gain() == 4.0);        // alpha = lambda theta
    CHECK(p.snr() == 2.0);                 // gamma = 1/k
    CHECK(p.transmission_mmse() == Catch::Approx(1.0 / (3.0 * 4.0)).epsilon(1e-15));
    CHECK(p.transmission_mmse() > 0.0);
    CHECK(p.transmission_mmse() < p.prior_variance());

    CHECK(ModelParams::from_snr(1.0, 4.0).shape == 0.25);
    CHECK_THROWS_AS(ModelParams::from_rate_shape_power(0.0, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(ModelParams::from_rate_shape_power(1.0, -1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(ModelParams::from_rate_shape_power(1.0, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(ModelParams::from_snr(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("optimal threshold") {
    const ModelParams p = unit_snr1();

    // c = 0: sqrt(m) = sqrt(0.5); grid-search oracle agrees
    CHECK(optimal_threshold(0.0, p) == Catch::Approx(0.7071067811865476).epsilon(1e-15));
    const double grid0 = oracles::minimize_on_grid(
        [&](double b) { return b > 0.0 ? stage_total_cost(b, 0.0, p) : p.transmission_mmse(); },
        0.0, 10.0, 1e-5);
    CHECK(std::abs(grid0 - optimal_threshold(0.0, p)) <= 2e-5);

    // c = 0.5: sqrt(1.0) = 1
    CHECK(optimal_threshold(0.5, p) == Catch::Approx(1.0).epsilon(1e-15));
    const double grid1 = oracles::minimize_on_grid(
        [&](double b) {
            return b > 0.0 ? stage_total_cost(b, 0.5, p) : p.transmission_mmse() + 0.5;
        },
        0.0, 10.0, 1e-5);
    CHECK(std::abs(grid1 - 1.0) <= 2e-5);

    // m -> 0 as gamma -> infinity
    CHECK(optimal_threshold(0.0, ModelParams::from_snr(1.0, 1e12)) < 1e-5);

    CHECK_THROWS_AS(optimal_threshold(-0.1, p), std::invalid_argument);
}

TEST_CASE("scheduler") {
    CHECK(schedule(2.0, 1.0, 3));
    CHECK_FALSE(schedule(2.0, 1.0, 0));       // budget exhausted
    CHECK_FALSE(schedule(1.0, 1.0, 3));       // boundary |x| == beta stays silent
    CHECK_FALSE(schedule(-0.5, 1.0, 3));
    CHECK(schedule(-2.0, 1.0, 1));
    CHECK_FALSE(schedule(5.0, kInf, 3));      // infinite threshold never transmits
    CHECK_THROWS_AS(schedule(1.0, -1.0, 1), std::invalid_argument);
}

TEST_CASE("encoder map") {
    const ModelParams p = unit_snr1();

    CHECK(encode(ChannelSymbol::absent(), 1.0, p) == ChannelSymbol::absent());
    // output is zero at the transmitted-tail mean beta + 1/lambda
    CHECK(encode(ChannelSymbol(2.0), 1.0, p).value() == 0.0);
    CHECK(encode(ChannelSymbol(-2.0), 1.0, p).value() == 0.0);
    CHECK_THROWS_AS(encode(ChannelSymbol(0.5), 1.0, p), std::invalid_argument);
    CHECK_THROWS_AS(encode(ChannelSymbol(1.0), 1.0, p), std::invalid_argument);
    CHECK_THROWS_AS(encode(ChannelSymbol(2.0), 0.0, p), std::invalid_argument);
}

TEST_CASE("encoder meets the power constraint with equality") {
    const ModelParams p = unit_snr1();
    int stream = 0;
    for (double beta : {0.3, 0.7071067811865476, 2.0}) {
        RngStream rng(31337, static_cast<std::uint64_t>(stream++));
        test_support::MomentAccumulator power;
        for (long i = 0; i < 1000000; ++i) {
            double w;
            do {
                w = -std::log(1.0 - rng.uniform01());
            } while (w == 0.0);
            const double sign = (rng.next_bits() & 1u) ? 1.0 : -1.0;
            const double y = encode(ChannelSymbol(sign * (beta + w)), beta, p).value();
            power.add(y * y);
        }
        INFO("beta " << beta << " mean power " << power.mean());
        CHECK(power.z_against(p.power) <= 4.0);
    }
}

TEST_CASE("decoder map") {
    const ModelParams p = unit_snr1();

    CHECK(decode(ChannelSymbol::absent(), SideSymbol::absent(), 1.0, p) == 0.0);
    // 0.5*0/alpha + 0.5/lambda + beta with gamma=1, lambda=1, beta=1
    CHECK(decode(ChannelSymbol(0.0), SideSymbol::from_sign(1.0), 1.0, p) ==
          Catch::Approx(1.5).epsilon(1e-15));
    CHECK(decode(ChannelSymbol(0.0), SideSymbol::from_sign(-1.0), 1.0, p) ==
          Catch::Approx(-1.5).epsilon(1e-15));

    CHECK_THROWS_AS(decode(ChannelSymbol(1.0), SideSymbol::absent(), 1.0, p), std::logic_error);
    CHECK_THROWS_AS(decode(ChannelSymbol::absent(), SideSymbol::from_sign(1.0), 1.0, p),
                    std::logic_error);
}

TEST_CASE("decoded sign follows the side channel") {
    const ModelParams p = ModelParams::from_snr(1.5, 0.8, 2.0);
    const double floor = -p.encoder_gain() / p.rate;  // encoder output minimum
    RngStream rng(11, 0);
    for (int i = 0; i < 2000; ++i) {
        const double beta = 0.05 + 3.0 * rng.uniform01();
        const double y_noisy = floor + 10.0 * rng.uniform01();
        const int sign = (rng.next_bits() & 1u) ? 1 : -1;
        const double x_hat =
            decode(ChannelSymbol(y_noisy), SideSymbol::from_sign(sign), beta, p);
        REQUIRE(x_hat * sign > 0.0);
    }
}

TEST_CASE("transmission error is unbiased with variance m, independent of beta") {
    const ModelParams p = unit_snr1();
    int stream = 0;
    for (double beta : {0.3, 0.7071067811865476, 2.0}) {
        RngStream rng(90210, static_cast<std::uint64_t>(stream++));
        const auto s = validation::coding_pipeline_mc(p, beta, 1000000, rng);
        INFO("beta " << beta << " mse " << s.mean_sq_err << " bias " << s.mean_err);
        CHECK(s.mmse_z <= 4.0);
        CHECK(s.bias_z <= 4.0);
    }
}

TEST_CASE("stage cost") {
    const ModelParams p = unit_snr1();

    SECTION("never transmitting pays the prior variance") {
        CHECK(stage_total_cost(kInf, 0.0, p) == 2.0);
        CHECK(stage_total_cost(kInf, 7.0, p) == 2.0);
    }

    SECTION("simplified form agrees at the optimal threshold") {
        for (double c : {0.0, 0.1, 0.5, 2.0, 10.0}) {
            const double beta = optimal_threshold(c, p);
            CHECK(stage_total_cost(beta, c, p) ==
                  Catch::Approx(optimal_stage_cost(c, p)).epsilon(1e-12));
        }
        // frozen value at c = 0: 2 [1 - (sqrt(0.5)+1) e^{-sqrt(0.5)}]
        CHECK(optimal_stage_cost(0.0, p) == Catch::Approx(0.3165581866568181).epsilon(1e-14));
    }

    SECTION("grid minimizer lands on sqrt(c+m)") {
        for (double c : {0.0, 0.5, 2.0}) {
            const double grid = oracles::minimize_on_grid(
                [&](double b) {
                    return b > 0.0 ? stage_total_cost(b, c, p) : p.transmission_mmse() + c;
                },
                0.0, 10.0, 1e-5);
            CHECK(std::abs(grid - optimal_threshold(c, p)) <= 2e-5);
        }
    }

    SECTION("first-order condition at the optimum") {
        const double h = 1e-6;
        for (double c : {0.0, 0.3, 1.0}) {
            const double beta = optimal_threshold(c, p);
            const double derivative =
                (stage_total_cost(beta + h, c, p) - stage_total_cost(beta - h, c, p)) / (2.0 * h);
            CHECK(std::abs(derivative) <= 1e-4);
        }
    }

    SECTION("argument checks") {
        CHECK_THROWS_AS(stage_total_cost(0.0, 0.0, p), std::invalid_argument);
        CHECK_THROWS_AS(stage_total_cost(1.0, -0.5, p), std::invalid_argument);
    }
}

TEST_CASE("channel and side symbols") {
    CHECK(ChannelSymbol::absent().is_absent());
    CHECK(ChannelSymbol(1.5).is_present());
    CHECK(ChannelSymbol(1.5).value() == 1.5);
    CHECK_THROWS_AS(ChannelSymbol::absent().value(), std::logic_error);
    CHECK(ChannelSymbol::absent() == ChannelSymbol::absent());
    CHECK_FALSE(ChannelSymbol(1.0) == ChannelSymbol::absent());

    CHECK(SideSymbol::from_sign(-3.0).sign() == -1);
    CHECK(SideSymbol::from_sign(2.0).sign() == 1);
    CHECK(SideSymbol::from_sign(0.0).sign() == 1);  // sign(0) fixed as +1
    CHECK(SideSymbol::absent().is_absent());
    CHECK_THROWS_AS(SideSymbol::absent().sign(), std::logic_error);
}
