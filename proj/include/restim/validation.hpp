#pragma once

// Self-contained verification suite behind the `validate` CLI command.
//
// Each check pits an implemented closed form against an independent route:
// adaptive quadrature for moments, dense grid search for thresholds, a
// brute-force recursion for the value table, and seeded Monte Carlo for the
// coding layer. Two checks double as discrepancy findings: the per-stage
// cost coefficient, where (lambda beta + 1) is consistent with the
// telescoped minimal error while the doubled variant (2 lambda beta + 1) is
// not, and the expected-usage exponent, where e^{-lambda sqrt(m)} is the
// probability-consistent form while e^{-lambda m} is not. The alternate
// variants are evaluated and reported rather than silently dropped; the
// check functions accept the formula under test so the suite can be turned
// on the wrong variants deliberately.

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "restim/analysis.hpp"
#include "restim/coding.hpp"
#include "restim/dp_solver.hpp"
#include "restim/format.hpp"
#include "restim/oracles.hpp"
#include "restim/simulator.hpp"

namespace restim::validation {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string details;
};

struct ValidationReport {
    std::vector<CheckResult> checks;
    nlohmann::json findings = nlohmann::json::object();

    bool all_passed() const {
        for (const CheckResult& c : checks) {
            if (!c.passed) return false;
        }
        return true;
    }

    nlohmann::json to_json() const {
        nlohmann::json jc = nlohmann::json::array();
        for (const CheckResult& c : checks) {
            jc.push_back({{"name", c.name}, {"passed", c.passed}, {"details", c.details}});
        }
        return nlohmann::json{
            {"all_passed", all_passed()}, {"checks", jc}, {"findings", findings}};
    }
};

// Per-stage cost at the optimal threshold, coefficient (lambda beta + 1).
// This is the form consistent with the telescoped minimal error.
inline double stage_gain_linear_coefficient(double beta, double rate) {
    const double lb = rate * beta;
    return 2.0 / (rate * rate) * (1.0 - (lb + 1.0) * std::exp(-lb));
}

// The doubled-coefficient variant (2 lambda beta + 1). Kept as an explicit
// candidate so the suite can demonstrate it fails the quadrature route.
inline double stage_gain_doubled_coefficient(double beta, double rate) {
    const double lb = rate * beta;
    return 2.0 / (rate * rate) * (1.0 - (2.0 * lb + 1.0) * std::exp(-lb));
}

// Expected surplus-budget usage with exponent lambda*sqrt(m) = 1/sqrt(1+gamma):
// T * P(|X| > sqrt(m)).
inline double usage_sqrt_exponent(int horizon, double gamma) {
    return static_cast<double>(horizon) * std::exp(-1.0 / std::sqrt(1.0 + gamma));
}

// The variant with exponent lambda*m = 1/(1+gamma), which does not equal
// T * P(|X| > sqrt(m)).
inline double usage_linear_exponent(int horizon, double gamma) {
    return static_cast<double>(horizon) * std::exp(-1.0 / (1.0 + gamma));
}

inline CheckResult check_quadrature_vs_closed_forms() {
    CheckResult result{"quadrature_vs_closed_forms", true, ""};
    double worst = 0.0;
    for (double rate : {0.5, 1.0, 2.0}) {
        const LaplaceParams source{rate};
        const double prior = 2.0 / (rate * rate);
        for (double beta : {0.25, 1.0, 3.0}) {
            const double closed = laplace_truncated_second_moment(beta, source);
            const double quad = oracles::quad_truncated_second_moment(beta, source);
            worst = std::max(worst, std::abs(closed - quad) / prior);
            // Complement identity: inside + outside = prior variance.
            const double complement = oracles::quad_tail_second_moment(beta, source);
            worst = std::max(worst, std::abs(closed + complement - prior) / prior);
        }
    }
    result.passed = worst <= 1e-8;
    result.details = "max relative deviation " + format_double(worst) + " (tol 1e-8)";
    return result;
}

inline CheckResult check_grid_search_vs_analytic_threshold() {
    CheckResult result{"grid_search_vs_analytic_threshold", true, ""};
    double worst = 0.0;
    for (double gamma : {0.5, 1.0, 2.0}) {
        const ModelParams params = ModelParams::from_snr(1.0, gamma);
        for (double comm_cost : {0.0, 0.5}) {
            const double analytic = optimal_threshold(comm_cost, params);
            const double grid = oracles::minimize_on_grid(
                [&](double b) {
                    return b > 0.0 ? stage_total_cost(b, comm_cost, params)
                                   : params.transmission_mmse() + comm_cost;
                },
                0.0, 10.0, 1e-5);
            worst = std::max(worst, std::abs(grid - analytic));
        }
    }
    result.passed = worst <= 2e-5;
    result.details = "max |grid argmin - sqrt(c+m)| = " + format_double(worst) + " (tol 2e-5)";
    return result;
}

inline CheckResult check_brute_force_dp() {
    CheckResult result{"brute_force_dp_small_horizons", true, ""};
    double worst = 0.0;
    for (double gamma : {0.5, 2.0}) {
        const ModelParams params = ModelParams::from_snr(1.0, gamma);
        for (int horizon = 1; horizon <= 3; ++horizon) {
            for (int budget = 0; budget <= 3; ++budget) {
                const ValueTable table = solve(HorizonSpec{horizon, budget}, params);
                const auto brute =
                    oracles::brute_force_value_table(horizon, budget, params, 1e-4);
                for (int t = 1; t <= horizon + 1; ++t) {
                    for (int e = 0; e <= budget; ++e) {
                        const double diff = std::abs(
                            table.value(t, e) -
                            brute[static_cast<std::size_t>(t)][static_cast<std::size_t>(e)]);
                        worst = std::max(worst, diff);
                    }
                }
            }
        }
    }
    result.passed = worst <= 1e-6;
    result.details = "max |solve - brute force| = " + format_double(worst) + " (tol 1e-6)";
    return result;
}

// Conditional Monte Carlo over transmitted samples: draws |X| = beta + W with
// W exponential (the Laplace tail is memoryless), runs the affine pipeline,
// and checks the power equality, the transmission MMSE, and unbiasedness.
struct CodingMcSummary {
    double mean_power = 0.0;
    double power_z = 0.0;
    double mean_sq_err = 0.0;
    double mmse_z = 0.0;
    double mean_err = 0.0;
    double bias_z = 0.0;
};

inline CodingMcSummary coding_pipeline_mc(const ModelParams& params, double beta,
                                          std::int64_t samples, RngStream& rng) {
    const GammaParams noise = params.noise();
    double sum_power = 0.0, sum_power_sq = 0.0;
    double sum_err = 0.0, sum_err_sq = 0.0;
    double sum_sq = 0.0, sum_sq_sq = 0.0;
    for (std::int64_t i = 0; i < samples; ++i) {
        double w;
        do {
            w = -std::log(1.0 - rng.uniform01()) / params.rate;
        } while (w == 0.0);
        const double sign = (rng.next_bits() & 1u) ? 1.0 : -1.0;
        const double x = sign * (beta + w);
        const ChannelSymbol sent = encode(ChannelSymbol(x), beta, params);
        const double y = sent.value();
        const double v = sample_gamma(rng, noise);
        const double x_hat =
            decode(ChannelSymbol(y + v), SideSymbol::from_sign(x), beta, params);
        const double err = x - x_hat;
        sum_power += y * y;
        sum_power_sq += (y * y) * (y * y);
        sum_err += err;
        sum_err_sq += err * err;
        sum_sq += err * err;
        sum_sq_sq += (err * err) * (err * err);
    }
    const double n = static_cast<double>(samples);
    const auto std_err = [n](double sum, double sum_of_squares) {
        const double mean = sum / n;
        const double variance = std::max(sum_of_squares / n - mean * mean, 0.0);
        return std::sqrt(variance / n);
    };
    CodingMcSummary s;
    s.mean_power = sum_power / n;
    s.power_z = std::abs(s.mean_power - params.power) / std_err(sum_power, sum_power_sq);
    s.mean_sq_err = sum_sq / n;
    s.mmse_z =
        std::abs(s.mean_sq_err - params.transmission_mmse()) / std_err(sum_sq, sum_sq_sq);
    s.mean_err = sum_err / n;
    s.bias_z = std::abs(s.mean_err) / std_err(sum_err, sum_err_sq);
    return s;
}

inline CheckResult check_mc_power_and_mmse(std::uint64_t seed, std::int64_t samples = 1000000) {
    CheckResult result{"mc_power_constraint_and_mmse", true, ""};
    const ModelParams params = ModelParams::from_snr(1.0, 1.0);
    const double beta = optimal_threshold(0.0, params);
    RngStream rng(seed, 0);
    const CodingMcSummary s = coding_pipeline_mc(params, beta, samples, rng);
    result.passed = s.power_z <= 4.0 && s.mmse_z <= 4.0 && s.bias_z <= 4.0;
    result.details = "E[Y^2|tx]=" + format_double(s.mean_power) + " (z=" +
                     format_double(s.power_z) + "), E[(X-X^)^2|tx]=" +
                     format_double(s.mean_sq_err) + " (z=" + format_double(s.mmse_z) +
                     "), E[X-X^|tx]=" + format_double(s.mean_err) + " (z=" +
                     format_double(s.bias_z) + "); all must be within 4 sigma";
    return result;
}

inline CheckResult check_closed_form_vs_table() {
    CheckResult result{"closed_form_minimal_error_vs_table", true, ""};
    double worst = 0.0;
    const int horizon = 100;
    for (double gamma : {0.1, 1.0, 10.0}) {
        const ModelParams params = ModelParams::from_snr(1.0, gamma);
        const ValueTable table = solve(HorizonSpec{horizon, horizon}, params);
        const double closed = minimal_error_closed_form(horizon, params);
        worst = std::max(worst, std::abs(table.value(1, horizon) - closed) / closed);
    }
    result.passed = worst <= 1e-9;
    result.details = "max relative gap " + format_double(worst) + " (tol 1e-9)";
    return result;
}

// Compares a candidate per-stage gain formula against the grid-minimized,
// quadrature-based one-stage cost. The shipped formula must agree; the
// doubled-coefficient variant must not.
inline CheckResult check_update_rule_coefficient(
    const std::function<double(double, double)>& stage_gain, const std::string& label) {
    CheckResult result{"update_rule_coefficient[" + label + "]", true, ""};
    double worst = 0.0;
    const double rate = 1.0;
    const LaplaceParams source{rate};
    // The quadrature grid depends only on the rate; build it once and reuse
    // it for every (gamma, comm_cost) combination.
    constexpr long kGridPoints = 60000;
    constexpr double kGridStep = 1e-4;
    std::vector<double> quad_trunc(kGridPoints + 1, 0.0);
    for (long i = 1; i <= kGridPoints; ++i) {
        quad_trunc[static_cast<std::size_t>(i)] = oracles::quad_truncated_second_moment(
            static_cast<double>(i) * kGridStep, source, 1e-9);
    }
    for (double gamma : {0.5, 1.0, 2.0}) {
        const ModelParams params = ModelParams::from_snr(rate, gamma);
        for (double comm_cost : {0.0, 0.3, 1.0}) {
            // Independent route: grid-minimize quadrature(trunc) + (m+c) tail.
            double best = params.transmission_mmse() + comm_cost;
            for (long i = 1; i <= kGridPoints; ++i) {
                const double beta = static_cast<double>(i) * kGridStep;
                const double cost = quad_trunc[static_cast<std::size_t>(i)] +
                                    (params.transmission_mmse() + comm_cost) *
                                        std::exp(-rate * beta);
                if (cost < best) best = cost;
            }
            const double candidate = stage_gain(std::sqrt(comm_cost + params.transmission_mmse()),
                                                rate);
            worst = std::max(worst, std::abs(candidate - best));
        }
    }
    result.passed = worst <= 1e-6;
    result.details = "max |candidate - quadrature grid min| = " + format_double(worst) +
                     " (tol 1e-6)";
    return result;
}

// Compares a candidate expected-usage formula against simulated surplus-budget
// usage at N = T, where every threshold sits at sqrt(m) and usage is
// Binomial(T, e^{-lambda sqrt(m)}).
inline CheckResult check_usage_law(const std::function<double(int, double)>& usage_formula,
                                   const std::string& label, std::uint64_t seed,
                                   std::int64_t episodes = 10000) {
    CheckResult result{"surplus_usage_law[" + label + "]", true, ""};
    const int horizon = 100;
    double worst_z = 0.0;
    std::string per_gamma;
    for (double gamma : {0.1, 1.0, 10.0}) {
        const ModelParams params = ModelParams::from_snr(1.0, gamma);
        const ValueTable table = solve(HorizonSpec{horizon, horizon}, params);
        const BatchStats stats = run_batch(table, episodes, seed);
        const double p_hat = stats.mean_transmissions / horizon;
        const double std_err =
            std::sqrt(horizon * p_hat * (1.0 - p_hat) / static_cast<double>(episodes));
        const double z = std::abs(stats.mean_transmissions - usage_formula(horizon, gamma)) /
                         std_err;
        worst_z = std::max(worst_z, z);
        if (!per_gamma.empty()) per_gamma += ", ";
        per_gamma += "gamma=" + format_double(gamma) + ": simulated " +
                     format_double(stats.mean_transmissions) + " vs formula " +
                     format_double(usage_formula(horizon, gamma)) + " (z=" + format_double(z) +
                     ")";
    }
    result.passed = worst_z <= 3.0;
    result.details = per_gamma + "; worst z " + format_double(worst_z) + " (tol 3 sigma)";
    return result;
}

struct PlateauFinding {
    double gamma = 0.0;
    int plateau = 0;                 // detect_plateau at rel_tol 1e-3
    double candidate_sqrt = 0.0;     // T e^{-lambda sqrt(m)}
    double candidate_linear = 0.0;   // T e^{-lambda m}
    double usage_simulated = 0.0;
    double usage_z_sqrt = 0.0;
    double usage_z_linear = 0.0;
};

inline std::vector<PlateauFinding> plateau_findings(std::uint64_t seed,
                                                    std::int64_t episodes = 10000) {
    const int horizon = 100;
    const std::vector<double> gammas{0.1, 1.0, 10.0};
    const SweepResult sweep = sweep_error_vs_budget(horizon, gammas, 1.0);
    std::vector<PlateauFinding> findings;
    for (double gamma : gammas) {
        PlateauFinding f;
        f.gamma = gamma;
        f.plateau = detect_plateau(sweep, gamma, 1e-3);
        f.candidate_sqrt = usage_sqrt_exponent(horizon, gamma);
        f.candidate_linear = usage_linear_exponent(horizon, gamma);
        const ModelParams params = ModelParams::from_snr(1.0, gamma);
        const ValueTable table = solve(HorizonSpec{horizon, horizon}, params);
        const BatchStats stats = run_batch(table, episodes, seed);
        f.usage_simulated = stats.mean_transmissions;
        const double p_hat = stats.mean_transmissions / horizon;
        const double std_err =
            std::sqrt(horizon * p_hat * (1.0 - p_hat) / static_cast<double>(episodes));
        f.usage_z_sqrt = std::abs(stats.mean_transmissions - f.candidate_sqrt) / std_err;
        f.usage_z_linear = std::abs(stats.mean_transmissions - f.candidate_linear) / std_err;
        findings.push_back(f);
    }
    return findings;
}

// The budget sweep plateau (rel_tol 1e-3) must sit within a tenth of the
// horizon of the expected-usage candidate T e^{-lambda sqrt(m)}. The plateau
// onset lags the mean usage by roughly two binomial standard deviations
// (about 8-10 budget units at T=100), so the candidate-relative deviation is
// reported but not gated on.
inline CheckResult check_plateau_vs_candidates(const std::vector<PlateauFinding>& findings,
                                               int horizon = 100) {
    CheckResult result{"plateau_vs_analytic_candidates", true, ""};
    const double band = 0.1 * horizon;
    std::string detail;
    bool ok = true;
    for (const PlateauFinding& f : findings) {
        const double dev_sqrt = f.plateau - f.candidate_sqrt;
        const double dev_linear = f.plateau - f.candidate_linear;
        ok = ok && std::abs(dev_sqrt) <= band;
        if (!detail.empty()) detail += ", ";
        detail += "gamma=" + format_double(f.gamma) + ": plateau " + std::to_string(f.plateau) +
                  ", T e^-lam sqrt(m) = " + format_double(f.candidate_sqrt) + " (dev " +
                  format_double(dev_sqrt) + " units), T e^-lam m = " +
                  format_double(f.candidate_linear) + " (dev " + format_double(dev_linear) +
                  " units)";
    }
    result.passed = ok;
    result.details = detail + "; band +-" + format_double(band) + " units";
    return result;
}

inline nlohmann::json findings_to_json(const std::vector<PlateauFinding>& findings,
                                       int horizon = 100) {
    nlohmann::json per_gamma = nlohmann::json::array();
    const double band = 0.1 * horizon;
    for (const PlateauFinding& f : findings) {
        per_gamma.push_back({
            {"gamma", f.gamma},
            {"plateau_rel_tol_1e-3", f.plateau},
            {"candidate_sqrt_exponent", f.candidate_sqrt},
            {"candidate_linear_exponent", f.candidate_linear},
            {"plateau_dev_units_sqrt", f.plateau - f.candidate_sqrt},
            {"plateau_dev_units_linear", f.plateau - f.candidate_linear},
            {"plateau_matches_sqrt_within_tenth_horizon",
             std::abs(f.plateau - f.candidate_sqrt) <= band},
            {"plateau_matches_linear_within_tenth_horizon",
             std::abs(f.plateau - f.candidate_linear) <= band},
            {"usage_simulated", f.usage_simulated},
            {"usage_z_sqrt_exponent", f.usage_z_sqrt},
            {"usage_z_linear_exponent", f.usage_z_linear},
            {"linear_exponent_matches_usage", f.usage_z_linear <= 3.0},
        });
    }
    return per_gamma;
}

inline ValidationReport run_validation(std::uint64_t seed) {
    ValidationReport report;
    const CheckResult update_rule =
        check_update_rule_coefficient(stage_gain_linear_coefficient, "lambda_beta_plus_one");
    const CheckResult usage = check_usage_law(usage_sqrt_exponent, "sqrt_exponent", seed);
    const std::vector<PlateauFinding> plateaus = plateau_findings(seed);

    report.checks.push_back(check_quadrature_vs_closed_forms());
    report.checks.push_back(check_grid_search_vs_analytic_threshold());
    report.checks.push_back(check_brute_force_dp());
    report.checks.push_back(check_mc_power_and_mmse(seed));
    report.checks.push_back(check_closed_form_vs_table());
    report.checks.push_back(update_rule);
    report.checks.push_back(usage);
    report.checks.push_back(check_plateau_vs_candidates(plateaus));

    // Discrepancy findings: evaluate the alternate printed variants through
    // the same machinery and record how far off they are.
    const CheckResult doubled =
        check_update_rule_coefficient(stage_gain_doubled_coefficient, "two_lambda_beta_plus_one");
    const CheckResult linear_usage =
        check_usage_law(usage_linear_exponent, "linear_exponent", seed);

    report.findings["update_rule_coefficient"] = {
        {"implemented", "(lambda*beta + 1)"},
        {"alternate_printed_variant", "(2*lambda*beta + 1)"},
        {"implemented_consistent_with_quadrature", update_rule.passed},
        {"alternate_consistent_with_quadrature", doubled.passed},
        {"alternate_details", doubled.details},
        {"conclusion",
         "the (lambda*beta + 1) coefficient matches the quadrature-minimized stage cost and the "
         "telescoped minimal error; the (2*lambda*beta + 1) variant does not"},
    };
    report.findings["opportunity_threshold_formula"] = {
        {"implemented_exponent", "lambda*sqrt(m) = 1/sqrt(1+gamma)"},
        {"alternate_printed_exponent", "lambda*m = 1/(1+gamma)"},
        {"implemented_consistent_with_simulated_usage", usage.passed},
        {"alternate_consistent_with_simulated_usage", linear_usage.passed},
        {"alternate_details", linear_usage.details},
        {"per_gamma", findings_to_json(plateaus)},
        {"conclusion",
         "T*e^{-lambda*sqrt(m)} equals T*P(|X|>sqrt(m)) and matches simulated surplus-budget "
         "usage at 3 sigma for every gamma; T*e^{-lambda*m} does not. The budget-sweep plateau "
         "at rel_tol 1e-3 lies within a tenth of the horizon of the sqrt-exponent candidate but "
         "above it, lagging the mean usage by roughly two binomial standard deviations."},
    };
    return report;
}

}  // namespace restim::validation
