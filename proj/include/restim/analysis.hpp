#pragma once

// Closed forms and experiment generators for the error-vs-budget phenomenology:
// the total-error curve over budgets, its plateau (the budget beyond which
// extra transmission opportunities stop helping), and the attained minimal
// error, all as functions of the channel SNR.

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

#include <json.hpp>

#include "restim/coding.hpp"
#include "restim/dp_solver.hpp"
#include "restim/format.hpp"

namespace restim {

struct SweepRow {
    double gamma = 0.0;
    int budget = 0;
    double j_star = 0.0;  // total expected error J*(1, budget)
};

struct OverlayPoint {
    double gamma = 0.0;
    double threshold_estimate = 0.0;  // expected-usage budget T e^{-lambda sqrt(m)}
    double minimal_error = 0.0;       // J*(1, T)
};

struct SweepResult {
    int horizon = 0;
    double rate = 0.0;
    std::vector<SweepRow> rows;         // grouped by gamma, budget ascending 0..T
    std::vector<OverlayPoint> overlay;  // one point per gamma
};

// Minimal total error with surplus budget, telescoped over the horizon:
// T 2/lambda^2 [1 - (1/sqrt(1+gamma) + 1) e^{-1/sqrt(1+gamma)}].
// Strictly decreasing in gamma; 0 at T = 0 and as gamma -> infinity.
inline double minimal_error_closed_form(int horizon, const ModelParams& params) {
    params.validate();
    if (horizon < 0) throw std::invalid_argument("minimal_error_closed_form: horizon must be >= 0");
    // lambda sqrt(m) = 1/sqrt(1+gamma); written gamma-only so the value is
    // exactly invariant in lambda up to the prior-variance prefactor.
    const double exponent = 1.0 / std::sqrt(1.0 + params.snr());
    return static_cast<double>(horizon) * params.prior_variance() *
           (1.0 - (exponent + 1.0) * std::exp(-exponent));
}

// Expected number of transmissions with surplus budget: every threshold sits
// at sqrt(m), each step transmits with probability P(|X| > sqrt(m)) =
// e^{-lambda sqrt(m)} = e^{-1/sqrt(1+gamma)}. The exponent depends on gamma
// only, so the estimate is exactly lambda-invariant.
inline double opportunity_threshold_estimate(int horizon, const ModelParams& params) {
    params.validate();
    if (horizon < 0) {
        throw std::invalid_argument("opportunity_threshold_estimate: horizon must be >= 0");
    }
    return static_cast<double>(horizon) * std::exp(-1.0 / std::sqrt(1.0 + params.snr()));
}

// Smallest budget N with J*(1, N) - J*(1, T) <= rel_tol J*(1, T).
inline int detect_plateau(const SweepResult& sweep, double gamma, double rel_tol) {
    if (!(rel_tol > 0.0)) throw std::invalid_argument("detect_plateau: rel_tol must be positive");
    std::vector<double> curve(static_cast<std::size_t>(sweep.horizon) + 1,
                              std::numeric_limits<double>::quiet_NaN());
    bool found = false;
    for (const SweepRow& row : sweep.rows) {
        if (row.gamma == gamma && row.budget >= 0 && row.budget <= sweep.horizon) {
            curve[static_cast<std::size_t>(row.budget)] = row.j_star;
            found = true;
        }
    }
    if (!found) throw std::invalid_argument("detect_plateau: gamma not present in sweep");
    for (double v : curve) {
        if (std::isnan(v)) {
            throw std::invalid_argument("detect_plateau: sweep missing budgets for this gamma");
        }
    }
    const double floor = curve[static_cast<std::size_t>(sweep.horizon)];
    for (int n = 0; n <= sweep.horizon; ++n) {
        if (curve[static_cast<std::size_t>(n)] - floor <= rel_tol * floor) return n;
    }
    return sweep.horizon;
}

// J*(1, N) for every N in 0..T and each gamma. One solve per gamma with the
// budget axis at its cap suffices: each cell depends only on the two cells
// below it on the next time row, so the table solved at budget T restricts
// exactly to the table solved at any smaller budget.
inline SweepResult sweep_error_vs_budget(int horizon, const std::vector<double>& gammas,
                                         double rate) {
    if (horizon < 1) throw std::invalid_argument("sweep_error_vs_budget: horizon must be >= 1");
    SweepResult sweep;
    sweep.horizon = horizon;
    sweep.rate = rate;
    sweep.rows.reserve(gammas.size() * (static_cast<std::size_t>(horizon) + 1));
    for (double gamma : gammas) {
        const ModelParams params = ModelParams::from_snr(rate, gamma);
        const ValueTable table = solve(HorizonSpec{horizon, horizon}, params);
        for (int n = 0; n <= horizon; ++n) {
            sweep.rows.push_back(SweepRow{gamma, n, table.value(1, n)});
        }
        sweep.overlay.push_back(OverlayPoint{gamma, opportunity_threshold_estimate(horizon, params),
                                             minimal_error_closed_form(horizon, params)});
    }
    return sweep;
}

// Parametric (expected-usage budget, minimal error) curve over an SNR grid.
// Along increasing gamma the first coordinate increases and the second
// decreases, approaching (T, 0).
inline std::vector<std::pair<double, double>> threshold_vs_minimal_error_curve(
    const std::vector<double>& gammas, int horizon, double rate) {
    if (gammas.empty()) {
        throw std::invalid_argument("threshold_vs_minimal_error_curve: gamma grid is empty");
    }
    std::vector<std::pair<double, double>> curve;
    curve.reserve(gammas.size());
    for (double gamma : gammas) {
        const ModelParams params = ModelParams::from_snr(rate, gamma);
        curve.emplace_back(opportunity_threshold_estimate(horizon, params),
                           minimal_error_closed_form(horizon, params));
    }
    return curve;
}

inline void write_sweep_csv(const SweepResult& sweep, std::ostream& out) {
    out << "gamma,N,J_star\n";
    for (const SweepRow& row : sweep.rows) {
        out << format_double(row.gamma) << ',' << row.budget << ',' << format_double(row.j_star)
            << '\n';
    }
}

inline nlohmann::json overlay_to_json(const SweepResult& sweep) {
    nlohmann::json points = nlohmann::json::array();
    for (const OverlayPoint& p : sweep.overlay) {
        points.push_back({{"gamma", p.gamma},
                          {"threshold_estimate", p.threshold_estimate},
                          {"minimal_error", p.minimal_error}});
    }
    return nlohmann::json{{"horizon", sweep.horizon}, {"rate", sweep.rate}, {"overlay", points}};
}

inline void write_curve_csv(const std::vector<std::pair<double, double>>& curve,
                            std::ostream& out) {
    out << "threshold_estimate,minimal_error\n";
    for (const auto& [threshold, error] : curve) {
        out << format_double(threshold) << ',' << format_double(error) << '\n';
    }
}

}  // namespace restim
