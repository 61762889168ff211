#pragma once

// Seeded closed-loop rollouts of the sensor -> encoder -> noisy channel +
// side channel -> decoder pipeline under the solved threshold policy.
//
// Budget dynamics: E_1 = N, E_{t+1} = E_t - U_t. Channel noise is drawn only
// on transmission steps, so a stream's draw sequence is independent of the
// budget level and seeds stay portable across configurations. Episode i of a
// batch always uses stream index i; batch statistics are therefore
// independent of execution order, and the fixed-order compensated merge
// makes them bit-reproducible.

#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "restim/coding.hpp"
#include "restim/distributions.hpp"
#include "restim/dp_solver.hpp"
#include "restim/format.hpp"

namespace restim {

struct StepRecord {
    int t = 0;
    double x = 0.0;                 // source sample X_t
    int e_before = 0;               // E_t
    bool u = false;                 // U_t
    ChannelSymbol y;                // encoder output Y_t
    std::optional<double> v;        // channel noise V_t, drawn only when transmitting
    ChannelSymbol y_noisy;          // received Y_t + V_t
    SideSymbol s;                   // sign side channel S_t
    double x_hat = 0.0;             // estimate X^_t
    double sq_err = 0.0;            // (X_t - X^_t)^2
};

struct EpisodeTrace {
    std::vector<StepRecord> records;
    double total_cost = 0.0;
    int transmissions_used = 0;
};

struct BatchStats {
    std::int64_t episodes = 0;
    double mean_total_cost = 0.0;
    double std_err_total_cost = 0.0;
    double mean_transmissions = 0.0;
    std::vector<std::int64_t> leftover_budget_histogram;  // index = N - transmissions
};

namespace detail {

// Kahan-Babuska (Neumaier) compensated accumulator.
class CompensatedSum {
  public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }

    double total() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace detail

// One closed-loop rollout. The decoder sees exactly (y_noisy, s) plus the
// budget-indexed threshold; the true sample and the scheduling decision
// never reach the decode call.
inline EpisodeTrace run_episode(const ValueTable& table, RngStream& rng) {
    const ModelParams& params = table.params();
    const LaplaceParams source = params.source();
    const GammaParams noise = params.noise();
    const int steps = table.horizon().horizon;

    EpisodeTrace trace;
    trace.records.reserve(steps);
    int budget = table.horizon().budget;

    for (int t = 1; t <= steps; ++t) {
        StepRecord rec;
        rec.t = t;
        rec.e_before = budget;
        rec.x = sample_laplace(rng, source);

        const double beta = table.policy_threshold(t, budget);
        rec.u = schedule(rec.x, beta, budget);

        const ChannelSymbol observed =
            rec.u ? ChannelSymbol(rec.x) : ChannelSymbol::absent();
        rec.y = encode(observed, beta, params);
        if (rec.u) {
            rec.v = sample_gamma(rng, noise);
            rec.y_noisy = ChannelSymbol(rec.y.value() + *rec.v);
            rec.s = SideSymbol::from_sign(rec.x);
        }
        rec.x_hat = decode(rec.y_noisy, rec.s, beta, params);

        const double err = rec.x - rec.x_hat;
        rec.sq_err = err * err;
        trace.total_cost += rec.sq_err;
        trace.transmissions_used += rec.u ? 1 : 0;
        budget -= rec.u ? 1 : 0;
        trace.records.push_back(rec);
    }
    return trace;
}

inline BatchStats run_batch(const ValueTable& table, std::int64_t episodes, std::uint64_t seed) {
    if (episodes < 1) throw std::invalid_argument("run_batch: episodes must be >= 1");

    const int budget = table.horizon().budget;
    BatchStats stats;
    stats.episodes = episodes;
    stats.leftover_budget_histogram.assign(static_cast<std::size_t>(budget) + 1, 0);

    detail::CompensatedSum cost_sum;
    detail::CompensatedSum cost_sq_sum;
    detail::CompensatedSum transmissions_sum;

    for (std::int64_t i = 0; i < episodes; ++i) {
        RngStream rng(seed, static_cast<std::uint64_t>(i));
        const EpisodeTrace trace = run_episode(table, rng);
        cost_sum.add(trace.total_cost);
        cost_sq_sum.add(trace.total_cost * trace.total_cost);
        transmissions_sum.add(static_cast<double>(trace.transmissions_used));
        stats.leftover_budget_histogram[static_cast<std::size_t>(budget - trace.transmissions_used)]++;
    }

    const double n = static_cast<double>(episodes);
    stats.mean_total_cost = cost_sum.total() / n;
    stats.mean_transmissions = transmissions_sum.total() / n;
    if (episodes > 1) {
        const double variance =
            (cost_sq_sum.total() - n * stats.mean_total_cost * stats.mean_total_cost) / (n - 1.0);
        stats.std_err_total_cost = std::sqrt(std::max(variance, 0.0) / n);
    }
    return stats;
}

// CSV export: one row per step, absent symbols as empty fields, signs as -1/1.
inline void write_trace_csv(const EpisodeTrace& trace, std::ostream& out) {
    out << "t,x,e_before,u,y,v,ytilde,s,xhat,sq_err\n";
    for (const StepRecord& rec : trace.records) {
        out << rec.t << ',' << format_double(rec.x) << ',' << rec.e_before << ','
            << (rec.u ? 1 : 0) << ',';
        if (rec.y.is_present()) out << format_double(rec.y.value());
        out << ',';
        if (rec.v) out << format_double(*rec.v);
        out << ',';
        if (rec.y_noisy.is_present()) out << format_double(rec.y_noisy.value());
        out << ',';
        if (rec.s.is_present()) out << rec.s.sign();
        out << ',' << format_double(rec.x_hat) << ',' << format_double(rec.sq_err) << '\n';
    }
}

}  // namespace restim
