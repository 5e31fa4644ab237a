#pragma once

#include <cmath>
#include <numbers>

#include "liquiforge/core/error.hpp"
#include "liquiforge/core/numerics.hpp"
#include "liquiforge/market/model.hpp"

namespace liquiforge {

// Black caplet on a unit flow (L - K)^+ paid at T2, per unit of the T2 bond P2.
inline double black_caplet(double P2, double L0, double K, double sigma, double T1) {
    const double sd = sigma * std::sqrt(T1);
    if (sd == 0.0 || K <= 0.0) return P2 * std::max(L0 - K, 0.0);
    const double dp = (std::log(L0 / K) + 0.5 * sd * sd) / sd;
    return P2 * (L0 * normal_cdf(dp) - K * normal_cdf(dp - sd));
}

// Put on the T2 bond with expiry T1 and strike X under the Gaussian short rate (OIS curve).
inline double gaussian_zero_bond_put(const GaussianShortRate& m, double T1, double T2, double X) {
    const double p1 = m.curve().ois_discount(T1), p2 = m.curve().ois_discount(T2);
    const double sp = m.volatility() * std::sqrt(T1 * phi1(2.0 * m.mean_reversion() * T1)) * m.B(T2 - T1);
    if (sp == 0.0) return std::max(X * p1 - p2, 0.0);
    const double h = std::log(p2 / (p1 * X)) / sp + 0.5 * sp;
    return X * p1 * normal_cdf(-h + sp) - p2 * normal_cdf(-h);
}

// Funding-discounted value of the caplet flow (L - K)^+ (times T2 - T1 when accrual) paid at T2.
inline double gaussian_caplet(const GaussianShortRate& m, double T1, double T2, double K, bool accrual = false) {
    const double dt = T2 - T1;
    const double put = gaussian_zero_bond_put(m, T1, T2, 1.0 / (1.0 + K * dt));
    const double unit = (1.0 + K * dt) * put / dt;
    return (accrual ? dt : 1.0) * unit * std::exp(-m.spread_integral(0.0, T2));
}

inline double gaussian_fra(const GaussianShortRate& m, double T1, double T2, double K, bool accrual = false) {
    const double dt = T2 - T1;
    const double p1 = m.curve().ois_discount(T1), p2 = m.curve().ois_discount(T2);
    return (accrual ? dt : 1.0) * ((p1 - p2) / dt - K * p2) * std::exp(-m.spread_integral(0.0, T2));
}

inline double measure_mix_residual_closed_form(double L0, double sigma_L, double T1, double T2) {
    require(T1 < T2, ErrorCode::Degenerate, "measure mix needs T1 < T2");
    require(L0 >= 0.0 && sigma_L >= 0.0 && T1 >= 0.0, ErrorCode::InvalidSpec, "inputs must be non-negative");
    return (T2 - T1) * L0 * L0 * std::exp(sigma_L * sigma_L * T1);
}

// E^{T1}[L] - E^{T2}[L] with the Radon-Nikodym normalisation P(T2;0)/P(T1;0) kept.
inline double measure_mix_expectation_difference(double L0, double sigma_L, double T1, double T2) {
    const double dt = T2 - T1;
    return dt * L0 * L0 * std::expm1(sigma_L * sigma_L * T1) / (1.0 + L0 * dt);
}

inline double digital_defect_factor(double L0, double T1, double T2) {
    return L0 * (T2 - T1) / (1.0 + L0 * (T2 - T1));
}

inline double digital_sum_defect_closed_form(double L0, double K, double sigma_L, double T1, double T2) {
    require(T1 < T2, ErrorCode::Degenerate, "digital pair needs T1 < T2");
    require(L0 > 0.0 && K > 0.0, ErrorCode::InvalidSpec, "digital defect needs L0, K > 0");
    const double factor = digital_defect_factor(L0, T1, T2);
    const double sd = sigma_L * std::sqrt(T1);
    if (sd == 0.0) return 0.0;
    const double dp = (std::log(L0 / K) + 0.5 * sd * sd) / sd;
    return factor * (normal_cdf(dp) - normal_cdf(dp - sd));
}

inline double digital_atm_approximation(double L0, double sigma_L, double T1, double T2) {
    return digital_defect_factor(L0, T1, T2) * sigma_L * std::sqrt(T1) / std::sqrt(2.0 * std::numbers::pi);
}

inline double bachelier_atm_defect(double L0, double sigma_N, double T1, double T2) {
    require(sigma_N >= 0.0, ErrorCode::InvalidSpec, "sigma_N must be >= 0");
    require(T1 < T2, ErrorCode::Degenerate, "digital pair needs T1 < T2");
    return (T2 - T1) / (1.0 + L0 * (T2 - T1)) * sigma_N * std::sqrt(T1) / std::sqrt(2.0 * std::numbers::pi);
}

} // namespace liquiforge
