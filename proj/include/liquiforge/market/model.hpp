#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "liquiforge/core/error.hpp"
#include "liquiforge/core/numerics.hpp"
#include "liquiforge/market/curve.hpp"
#include "liquiforge/market/time_grid.hpp"

namespace liquiforge {

enum class ModelKind { DETERMINISTIC, BLACK_SINGLE_PERIOD, GAUSSIAN_SHORT_RATE };

struct NumeraireChoice {
    enum class Kind { TERMINAL_BOND, FUNDING_ACCOUNT };
    Kind kind = Kind::FUNDING_ACCOUNT;
    double maturity = 0.0;

    static NumeraireChoice terminal_bond(double T) { return {Kind::TERMINAL_BOND, T}; }
    static NumeraireChoice funding_account() { return {Kind::FUNDING_ACCOUNT, 0.0}; }

    bool operator==(const NumeraireChoice& o) const {
        return kind == o.kind && (kind == Kind::FUNDING_ACCOUNT || std::abs(maturity - o.maturity) <= TimeGrid::kTolerance);
    }
};

struct MeasureSpec {
    NumeraireChoice numeraire;
    CurveKind curve_kind = CurveKind::FUNDING;

    static MeasureSpec terminal_bond(double T, CurveKind k = CurveKind::FUNDING) {
        return {NumeraireChoice::terminal_bond(T), k};
    }
    static MeasureSpec funding_account(CurveKind k = CurveKind::FUNDING) {
        return {NumeraireChoice::funding_account(), k};
    }

    bool operator==(const MeasureSpec& o) const { return numeraire == o.numeraire && curve_kind == o.curve_kind; }
};

struct BlackParams {
    double L0 = 0.03;
    double sigma = 0.2;
    double T1 = 5.0;
    double T2 = 5.5;
    // P(T1;0); flat continuous compounding at L0 when unset.
    std::optional<double> discount_T1;

    double accrual() const { return T2 - T1; }
    double initial_discount_T1() const { return discount_T1.value_or(std::exp(-L0 * T1)); }
};

struct GaussianParams {
    double mean_reversion = 0.1;
    double volatility = 0.01;
    DiscountCurve curve = DiscountCurve::flat(CurveKind::FUNDING, 0.03, 30.0);
};

struct ModelSpec {
    ModelKind kind = ModelKind::GAUSSIAN_SHORT_RATE;
    BlackParams black;
    GaussianParams gaussian;
    NumeraireChoice numeraire = NumeraireChoice::funding_account();

    void validate() const {
        switch (kind) {
        case ModelKind::BLACK_SINGLE_PERIOD:
            require(black.sigma >= 0.0 && std::isfinite(black.sigma), ErrorCode::InvalidSpec, "sigma_L must be >= 0");
            require(black.T1 > 0.0 && black.T1 < black.T2, ErrorCode::InvalidSpec, "Black model needs 0 < T1 < T2");
            require(black.L0 > -1.0 / black.accrual(), ErrorCode::InvalidSpec, "L0 gives non-positive bond");
            require(!black.discount_T1 || *black.discount_T1 > 0.0, ErrorCode::InvalidSpec, "P(T1;0) must be positive");
            require(numeraire.kind == NumeraireChoice::Kind::TERMINAL_BOND &&
                        std::abs(numeraire.maturity - black.T2) <= TimeGrid::kTolerance,
                    ErrorCode::InvalidSpec, "Black model is simulated under the T2-bond measure");
            break;
        case ModelKind::DETERMINISTIC:
        case ModelKind::GAUSSIAN_SHORT_RATE:
            require(gaussian.mean_reversion >= 0.0, ErrorCode::InvalidSpec, "mean reversion must be >= 0");
            require(gaussian.volatility >= 0.0 && std::isfinite(gaussian.volatility), ErrorCode::InvalidSpec,
                    "sigma_r must be >= 0");
            break;
        }
    }
};

// Zero-bond map (t, T, state) -> P(T;t) plus the deterministic cumulative spread.
class TermStructure {
public:
    virtual ~TermStructure() = default;
    virtual double ois_bond(double t, double T, double state) const = 0;
    virtual double initial_ois(double T) const = 0;
    virtual double spread_integral(double t, double T) const = 0;
    virtual double horizon() const = 0;

    double funding_bond(double t, double T, double state) const {
        if (std::abs(T - t) <= TimeGrid::kTolerance) return 1.0;
        return ois_bond(t, T, state) * std::exp(-spread_integral(t, T));
    }
};

/// One-factor Gaussian short rate r = x + phi fitted to the initial curve, x(0) = 0.
class GaussianShortRate final : public TermStructure {
public:
    GaussianShortRate(double a, double sigma, DiscountCurve curve) : a_(a), sigma_(sigma), curve_(std::move(curve)) {}

    double mean_reversion() const { return a_; }
    double volatility() const { return sigma_; }
    const DiscountCurve& curve() const { return curve_; }

    double B(double tau) const { return tau * phi1(a_ * tau); }

    // Var of the integral of x over a period of length tau started from a known x.
    double integrated_variance(double tau) const {
        if (sigma_ == 0.0 || tau <= 0.0) return 0.0;
        const double u = a_ * tau;
        if (u < 0.05) {
            // u^-3 * (u - 2(1-e^-u) + (1-e^-2u)/2) as a series
            double sum = 0.0, term = 1.0 / 6.0, pow2 = 4.0;
            for (int k = 3; k < 24; ++k) {
                sum += term * (pow2 - 2.0);
                term *= -u / static_cast<double>(k + 1);
                pow2 *= 2.0;
            }
            return sigma_ * sigma_ * tau * tau * tau * sum;
        }
        const double f = u + 2.0 * std::expm1(-u) - 0.5 * std::expm1(-2.0 * u);
        return sigma_ * sigma_ * f / (a_ * a_ * a_);
    }

    double ois_bond(double t, double T, double x) const override {
        if (T < t - TimeGrid::kTolerance) fail(ErrorCode::NegativeTimeOrder, "bond maturity before valuation time");
        if (std::abs(T - t) <= TimeGrid::kTolerance) return 1.0;
        const double ratio = curve_.ois_discount(T) / curve_.ois_discount(t);
        if (sigma_ == 0.0) return ratio;
        const double convexity =
            0.5 * (integrated_variance(T - t) - integrated_variance(T) + integrated_variance(t));
        return ratio * std::exp(convexity - B(T - t) * x);
    }

    double initial_ois(double T) const override { return curve_.ois_discount(T); }
    double spread_integral(double t, double T) const override { return curve_.spread_integral(t, T); }
    double horizon() const override { return curve_.max_time(); }

    double state_decay(double h) const { return std::exp(-a_ * h); }
    double state_std(double h) const { return sigma_ * std::sqrt(h * phi1(2.0 * a_ * h)); }

    // Cov(x(t), integral of x over [s,t]) for step h given x(s).
    double state_integral_cov(double h) const {
        const double b = B(h);
        return 0.5 * sigma_ * sigma_ * b * b;
    }

    // Drift correction of x over [s, t] under the T-bond measure.
    double forward_drift(double s, double t, double T) const {
        const double h = t - s;
        const double ah = phi1(a_ * h);
        const double e = std::exp(-a_ * (T - t));
        return sigma_ * sigma_ * h * ah * ((T - t) * phi1(a_ * (T - t)) + 0.5 * e * h * ah);
    }

    // Bank account from the integrated state: exp(I) exp(V(0,t)/2) / P(0,t).
    double ois_account(double t, double integral) const {
        return std::exp(integral + 0.5 * integrated_variance(t)) / curve_.ois_discount(t);
    }

private:
    double a_;
    double sigma_;
    DiscountCurve curve_;
};

/// Single-period forward-rate model; state at T1 is L(T1,T2;T1), at 0 it is L0.
class BlackSinglePeriod final : public TermStructure {
public:
    explicit BlackSinglePeriod(BlackParams p) : p_(p) {}

    const BlackParams& params() const { return p_; }

    double bond_ratio(double L) const { return 1.0 / (1.0 + L * p_.accrual()); }

    double ois_bond(double t, double T, double state) const override {
        const double tol = TimeGrid::kTolerance;
        if (T < t - tol) fail(ErrorCode::NegativeTimeOrder, "bond maturity before valuation time");
        if (std::abs(T - t) <= tol) return 1.0;
        if (std::abs(t) <= tol) {
            if (std::abs(T - p_.T1) <= tol) return p_.initial_discount_T1();
            if (std::abs(T - p_.T2) <= tol) return p_.initial_discount_T1() * bond_ratio(state);
        }
        if (std::abs(t - p_.T1) <= tol && std::abs(T - p_.T2) <= tol) return bond_ratio(state);
        fail(ErrorCode::NotOnGrid, "Black model prices only the T1 and T2 bonds");
    }

    double initial_ois(double T) const override { return ois_bond(0.0, T, p_.L0); }
    double spread_integral(double, double) const override { return 0.0; }
    double horizon() const override { return p_.T2; }

private:
    BlackParams p_;
};

} // namespace liquiforge
