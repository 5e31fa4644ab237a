#pragma once

#include <cmath>

#include "liquiforge/core/error.hpp"
#include "liquiforge/core/numerics.hpp"

namespace liquiforge {

// Unit flow X paid at T_i when Z > Lambda_i, else at T_j; Z ~ N(mu, sigma) independent of Lambda.
struct TimingMismatchSpec {
    double amount = 1.0;
    double mu = 0.0;
    double sigma = 1.0;
    double lambda = 0.0;
    double bond_i = 1.0;  // P^f(T_i;0)
    double bond_j = 1.0;  // P^f(T_j;0)

    void validate() const {
        require(sigma > 0.0 && std::isfinite(sigma), ErrorCode::InvalidSpec, "Z needs a positive finite standard deviation");
        require(bond_i > 0.0 && bond_j > 0.0, ErrorCode::InvalidSpec, "discount factors must be positive");
    }
    double density(double l) const { return normal_pdf((l - mu) / sigma) / sigma; }
    double cdf(double l) const { return normal_cdf((l - mu) / sigma); }
};

struct TimingMismatch {
    double expected_flow = 0.0;
    double mismatch = 0.0;
    double total() const { return expected_flow + mismatch; }
};

inline TimingMismatch timing_mismatch_closed_form(const TimingMismatchSpec& m) {
    m.validate();
    return {m.amount * (1.0 - m.cdf(m.lambda)) * m.bond_i, m.amount * m.density(m.lambda) * (m.bond_i - m.bond_j)};
}

// V(l) with the T_i discount shifted by exp(-(l - lambda)) and the payment time switching at Z = l.
inline double timing_mismatch_value(const TimingMismatchSpec& m, double l) {
    const double q = m.cdf(l);
    return m.amount * (m.bond_i * std::exp(-(l - m.lambda)) * (1.0 - q) + m.bond_j * q);
}

inline double timing_mismatch_finite_difference(const TimingMismatchSpec& m, double h_rel = 1e-3) {
    m.validate();
    const double h = h_rel * m.sigma;
    return (timing_mismatch_value(m, m.lambda - h) - timing_mismatch_value(m, m.lambda + h)) / (2.0 * h);
}

} // namespace liquiforge
