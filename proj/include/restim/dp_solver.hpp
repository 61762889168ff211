#pragma once

// Backward induction over the (time, remaining budget) grid.
//
// J(T+1, e) = 0. At each earlier stage, a step with no budget pays the prior
// variance 2/lambda^2; a step with budget e >= 1 pays the optimal one-stage
// cost at communication price c_t(e) = J(t+1, e-1) - J(t+1, e), reached with
// threshold beta = sqrt(c_t(e) + m). The whole table costs O(T N) arithmetic.
//
// The budget axis is capped at min(N, T): a cell with e >= T - t + 1 can
// never exhaust its budget, so every column beyond the cap repeats the cap
// column exactly (bitwise, by induction from the terminal row). Queries with
// larger e map onto the cap.

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "restim/coding.hpp"

namespace restim {

struct HorizonSpec {
    int horizon;  // T >= 1
    int budget;   // N >= 0; may exceed T

    void validate() const {
        if (horizon < 1) throw std::invalid_argument("HorizonSpec: horizon must be >= 1");
        if (budget < 0) throw std::invalid_argument("HorizonSpec: budget must be >= 0");
    }
};

class ValueTable {
  public:
    ValueTable(HorizonSpec horizon, ModelParams params)
        : horizon_(checked(horizon)),
          params_(checked(params)),
          cap_(std::min(horizon.budget, horizon.horizon)),
          values_(static_cast<std::size_t>(horizon.horizon + 1) * (cap_ + 1), 0.0),
          thresholds_(static_cast<std::size_t>(horizon.horizon) * cap_, 0.0),
          costs_(static_cast<std::size_t>(horizon.horizon) * cap_, 0.0) {}

    const HorizonSpec& horizon() const { return horizon_; }
    const ModelParams& params() const { return params_; }
    int budget_cap() const { return cap_; }

    // J(t, e); t in 1..T+1, e in 0..N (e beyond the cap reads the cap column).
    double value(int t, int e) const {
        check_time(t, horizon_.horizon + 1);
        check_budget(e, 0);
        return values_[value_index(t, clamp(e))];
    }

    // c_t(e) = J(t+1, e-1) - J(t+1, e); t in 1..T, e in 1..N.
    double opportunity_cost(int t, int e) const {
        check_time(t, horizon_.horizon);
        check_budget(e, 1);
        return costs_[policy_index(t, clamp(e))];
    }

    // beta*_t(e) for e >= 1; an infinite threshold encodes "never transmit"
    // when the budget is exhausted.
    double policy_threshold(int t, int e) const {
        check_time(t, horizon_.horizon);
        check_budget(e, 0);
        if (e == 0) return std::numeric_limits<double>::infinity();
        return thresholds_[policy_index(t, clamp(e))];
    }

    nlohmann::json to_json() const {
        return nlohmann::json{
            {"params",
             {{"rate", params_.rate}, {"shape", params_.shape}, {"power", params_.power}}},
            {"horizon", {{"horizon", horizon_.horizon}, {"budget", horizon_.budget}}},
            {"J", values_},
            {"beta", thresholds_},
            {"c", costs_},
        };
    }

    static ValueTable from_json(const nlohmann::json& doc) {
        const auto& jp = doc.at("params");
        const auto& jh = doc.at("horizon");
        ModelParams params = ModelParams::from_rate_shape_power(
            jp.at("rate").get<double>(), jp.at("shape").get<double>(), jp.at("power").get<double>());
        HorizonSpec horizon{jh.at("horizon").get<int>(), jh.at("budget").get<int>()};
        ValueTable table(horizon, params);
        table.values_ = doc.at("J").get<std::vector<double>>();
        table.thresholds_ = doc.at("beta").get<std::vector<double>>();
        table.costs_ = doc.at("c").get<std::vector<double>>();
        const std::size_t t_rows = static_cast<std::size_t>(horizon.horizon);
        const std::size_t cols = static_cast<std::size_t>(table.cap_) + 1;
        if (table.values_.size() != (t_rows + 1) * cols ||
            table.thresholds_.size() != t_rows * (cols - 1) ||
            table.costs_.size() != t_rows * (cols - 1)) {
            throw std::invalid_argument("ValueTable: serialized array sizes do not match horizon");
        }
        return table;
    }

    friend bool operator==(const ValueTable& a, const ValueTable& b) {
        return a.horizon_.horizon == b.horizon_.horizon && a.horizon_.budget == b.horizon_.budget &&
               a.params_.rate == b.params_.rate && a.params_.shape == b.params_.shape &&
               a.params_.power == b.params_.power && bitwise_equal(a.values_, b.values_) &&
               bitwise_equal(a.thresholds_, b.thresholds_) && bitwise_equal(a.costs_, b.costs_);
    }

    friend ValueTable solve(const HorizonSpec& horizon, const ModelParams& params);

  private:
    static HorizonSpec checked(HorizonSpec horizon) {
        horizon.validate();
        return horizon;
    }

    static ModelParams checked(ModelParams params) {
        params.validate();
        return params;
    }

    int clamp(int e) const { return e < cap_ ? e : cap_; }

    void check_time(int t, int t_max) const {
        if (t < 1 || t > t_max) {
            throw std::out_of_range("ValueTable: time index " + std::to_string(t) +
                                    " outside 1.." + std::to_string(t_max));
        }
    }

    void check_budget(int e, int e_min) const {
        if (e < e_min || e > horizon_.budget) {
            throw std::out_of_range("ValueTable: budget index " + std::to_string(e) +
                                    " outside " + std::to_string(e_min) + ".." +
                                    std::to_string(horizon_.budget));
        }
    }

    // values_: rows t = 1..T+1, columns e = 0..cap.
    std::size_t value_index(int t, int e) const {
        return static_cast<std::size_t>(t - 1) * (cap_ + 1) + e;
    }

    // thresholds_/costs_: rows t = 1..T, columns e = 1..cap.
    std::size_t policy_index(int t, int e) const {
        return static_cast<std::size_t>(t - 1) * cap_ + (e - 1);
    }

    static bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
        return a.size() == b.size() &&
               (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
    }

    HorizonSpec horizon_;
    ModelParams params_;
    int cap_;
    std::vector<double> values_;
    std::vector<double> thresholds_;
    std::vector<double> costs_;
};

// Backward induction. Sequential by construction; the arithmetic order is
// fixed so repeated solves are bit-identical.
inline ValueTable solve(const HorizonSpec& horizon, const ModelParams& params) {
    horizon.validate();
    params.validate();
    ValueTable table(horizon, params);

    const int t_end = horizon.horizon;
    const int cap = table.cap_;
    const double never_transmit_cost = params.prior_variance();
    const double mmse = params.transmission_mmse();

    for (int t = t_end; t >= 1; --t) {
        const double* next = &table.values_[table.value_index(t + 1, 0)];
        table.values_[table.value_index(t, 0)] = next[0] + never_transmit_cost;
        for (int e = 1; e <= cap; ++e) {
            const double comm_cost = next[e - 1] - next[e];
            if (!(comm_cost >= 0.0)) {
                throw std::runtime_error("solve: negative opportunity cost " +
                                         std::to_string(comm_cost) + " at t=" + std::to_string(t) +
                                         " e=" + std::to_string(e));
            }
            const double beta = std::sqrt(comm_cost + mmse);
            const double lb = params.rate * beta;
            const double stage = never_transmit_cost * (1.0 - (lb + 1.0) * std::exp(-lb));
            const double value = next[e] + stage;
            if (!std::isfinite(value)) {
                throw std::runtime_error("solve: non-finite value at t=" + std::to_string(t) +
                                         " e=" + std::to_string(e));
            }
            table.costs_[table.policy_index(t, e)] = comm_cost;
            table.thresholds_[table.policy_index(t, e)] = beta;
            table.values_[table.value_index(t, e)] = value;
        }
    }
    return table;
}

}  // namespace restim
