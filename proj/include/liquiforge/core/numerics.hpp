#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

namespace liquiforge {

inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

inline double normal_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

// Fixed-order pairwise summation; the result depends only on the input order.
inline double pairwise_sum(std::span<const double> v) {
    const std::size_t n = v.size();
    if (n <= 16) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
};

// Sample mean and standard error of the mean.
inline Estimate estimate(std::span<const double> v) {
    const std::size_t n = v.size();
    if (n == 0) return {};
    const double mean = pairwise_sum(v) / static_cast<double>(n);
    if (n < 2) return {mean, 0.0};
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = v[i] - mean;
        sq[i] = d * d;
    }
    const double var = pairwise_sum(sq) / static_cast<double>(n - 1);
    return {mean, std::sqrt(var / static_cast<double>(n))};
}

inline double combined_std_error(double a, double b) {
    return std::sqrt(a * a + b * b);
}

inline bool within_std_errors(double value, double target, double std_error, double k = 3.0) {
    return std::abs(value - target) <= k * std_error;
}

// (1 - exp(-v)) / v, continuous at v = 0.
inline double phi1(double v) {
    if (v == 0.0) return 1.0;
    return -std::expm1(-v) / v;
}

} // namespace liquiforge
