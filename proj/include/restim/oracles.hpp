#pragma once

// Independent numerical cross-checks: adaptive quadrature for moments,
// dense-grid minimization for thresholds, and a brute-force variant of the
// backward induction that never uses the analytic minimizer or the
// simplified stage-cost form. These exist to arbitrate the closed forms, so
// none of them may call into the code paths they check.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "restim/coding.hpp"
#include "restim/distributions.hpp"

namespace restim::oracles {

namespace detail {

inline double simpson(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_step(const std::function<double(double)>& f, double a, double b, double fa,
                            double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(a, m, fa, flm, fm);
    const double right = simpson(m, b, fm, frm, fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance tol.
inline double integrate(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth = 50) {
    if (a == b) return 0.0;
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = detail::simpson(a, b, fa, fm, fb);
    return detail::adaptive_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

// Quadrature route for E[X^2 1{|X| <= beta}] under Laplace(0, 1/lambda):
// 2 * integral over [0, beta] by symmetry.
inline double quad_truncated_second_moment(double beta, const LaplaceParams& source,
                                           double rel_tol = 1e-11) {
    if (beta < 0.0) throw std::invalid_argument("quad_truncated_second_moment: beta < 0");
    if (beta == 0.0) return 0.0;
    const auto integrand = [&](double x) { return x * x * laplace_pdf(x, source); };
    const double scale = 2.0 / (source.rate * source.rate);
    return 2.0 * integrate(integrand, 0.0, beta, 0.5 * rel_tol * scale);
}

// Quadrature route for E[X^2 1{|X| > beta}]; the integrand decays like
// e^{-lambda x}, so a cutoff 80/lambda past beta is below double precision.
inline double quad_tail_second_moment(double beta, const LaplaceParams& source,
                                      double rel_tol = 1e-11) {
    if (beta < 0.0) throw std::invalid_argument("quad_tail_second_moment: beta < 0");
    const auto integrand = [&](double x) { return x * x * laplace_pdf(x, source); };
    const double scale = 2.0 / (source.rate * source.rate);
    const double cutoff = beta + 80.0 / source.rate;
    return 2.0 * integrate(integrand, beta, cutoff, 0.5 * rel_tol * scale);
}

// Argmin of f over {lo, lo+step, ..., hi} by exhaustive scan.
inline double minimize_on_grid(const std::function<double(double)>& f, double lo, double hi,
                               double step) {
    if (!(step > 0.0) || !(hi > lo)) {
        throw std::invalid_argument("minimize_on_grid: need hi > lo and step > 0");
    }
    double best_x = lo;
    double best_f = f(lo);
    const long count = static_cast<long>((hi - lo) / step);
    for (long i = 1; i <= count; ++i) {
        const double x = lo + static_cast<double>(i) * step;
        const double fx = f(x);
        if (fx < best_f) {
            best_f = fx;
            best_x = x;
        }
    }
    return best_x;
}

// Backward induction that minimizes stage_total_cost over a dense threshold
// grid at every budget-carrying cell instead of using the analytic optimum.
// Returns rows J[t][e] for t = 1..T+1 (row 0 unused), e = 0..N.
inline std::vector<std::vector<double>> brute_force_value_table(int horizon, int budget,
                                                                const ModelParams& params,
                                                                double grid_step = 1e-4,
                                                                double beta_max = 12.0) {
    params.validate();
    if (horizon < 1 || budget < 0) {
        throw std::invalid_argument("brute_force_value_table: invalid horizon or budget");
    }
    std::vector<std::vector<double>> values(
        static_cast<std::size_t>(horizon) + 2,
        std::vector<double>(static_cast<std::size_t>(budget) + 1, 0.0));
    for (int t = horizon; t >= 1; --t) {
        const auto& next = values[static_cast<std::size_t>(t) + 1];
        auto& row = values[static_cast<std::size_t>(t)];
        row[0] = next[0] + params.prior_variance();
        for (int e = 1; e <= budget; ++e) {
            const double comm_cost = next[static_cast<std::size_t>(e) - 1] -
                                     next[static_cast<std::size_t>(e)];
            // beta = 0 (always transmit) costs exactly m + comm_cost.
            double best = params.transmission_mmse() + comm_cost;
            const long count = static_cast<long>(beta_max / grid_step);
            for (long i = 1; i <= count; ++i) {
                const double beta = static_cast<double>(i) * grid_step;
                const double c = stage_total_cost(beta, comm_cost, params);
                if (c < best) best = c;
            }
            row[static_cast<std::size_t>(e)] = next[static_cast<std::size_t>(e)] + best;
        }
    }
    return values;
}

}  // namespace restim::oracles
