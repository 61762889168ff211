#pragma once

// Shared helpers for the test binaries: running-moment accumulators and the
// Kolmogorov-Smirnov statistic against an analytic CDF.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace test_support {

struct MomentAccumulator {
    double sum = 0.0;
    double sum_sq = 0.0;
    long n = 0;

    void add(double x) {
        sum += x;
        sum_sq += x * x;
        ++n;
    }

    double mean() const { return sum / n; }

    double variance() const {
        const double m = mean();
        return (sum_sq - n * m * m) / (n - 1);
    }

    double std_err() const { return std::sqrt(std::max(variance(), 0.0) / n); }

    // |mean - target| in units of the standard error.
    double z_against(double target) const { return std::abs(mean() - target) / std_err(); }
};

inline double ks_statistic(std::vector<double> samples,
                           const std::function<double(double)>& cdf) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max(d, f - static_cast<double>(i) / n);
        d = std::max(d, static_cast<double>(i + 1) / n - f);
    }
    return d;
}

// Asymptotic KS critical value at significance alpha: sqrt(-ln(alpha/2)/2) / sqrt(n).
inline double ks_critical(double alpha, std::size_t n) {
    return std::sqrt(-std::log(alpha / 2.0) / 2.0) / std::sqrt(static_cast<double>(n));
}

}  // namespace test_support
