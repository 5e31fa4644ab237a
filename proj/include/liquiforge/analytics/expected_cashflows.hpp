#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "liquiforge/core/error.hpp"
#include "liquiforge/core/numerics.hpp"
#include "liquiforge/market/scenario_set.hpp"
#include "liquiforge/products/cashflow_stream.hpp"

namespace liquiforge {

enum class EcConvention { EC_P, EC_Q, EC_Q_PROXY, EC_PER_BOND, TIMING_RATIO };

inline std::string to_string(EcConvention c) {
    switch (c) {
    case EcConvention::EC_P: return "EC_P";
    case EcConvention::EC_Q: return "EC_Q";
    case EcConvention::EC_Q_PROXY: return "EC_Q_PROXY";
    case EcConvention::EC_PER_BOND: return "EC_PER_BOND";
    case EcConvention::TIMING_RATIO: return "TIMING_RATIO";
    }
    return "?";
}

struct ExpectedCashFlowProfile {
    std::vector<double> times;
    std::vector<double> values;
    std::vector<double> std_errors;
    EcConvention convention = EcConvention::EC_Q;
    std::optional<MeasureSpec> measure;

    double total() const {
        double t = 0.0;
        for (double v : values) t += v;
        return t;
    }
};

namespace detail {

// Mean and standard error, weighted by scenario probabilities when the set carries them.
inline Estimate scenario_mean(const ScenarioSet& s, const std::vector<double>& v) {
    if (!s.has_weights()) return estimate(v);
    const auto& w = s.weights();
    double m = 0.0;
    for (std::size_t p = 0; p < v.size(); ++p) m += w[p] * v[p];
    return {m, 0.0};
}

inline void check_stream(const CashFlowStream& stream, const ScenarioSet& s) {
    require_same_grid(stream.grid(), s.grid(), "expected cash-flows");
    require(stream.paths() == s.paths(), ErrorCode::GridMismatch, "stream and scenario set path counts differ");
}

} // namespace detail

// Per-time expectation of X_i under measure m; a bond measure covers times up to its maturity.
inline ExpectedCashFlowProfile expected_cashflows(const CashFlowStream& stream, const ScenarioSet& s, const MeasureSpec& m) {
    detail::check_stream(stream, s);
    ExpectedCashFlowProfile out;
    out.convention = EcConvention::EC_Q;
    out.measure = m;
    const bool change = !(m == s.measure());
    std::vector<double> v(s.paths());
    for (std::size_t i = 1; i < s.times(); ++i) {
        if (m.numeraire.kind == NumeraireChoice::Kind::TERMINAL_BOND &&
            s.grid()[i] > m.numeraire.maturity + TimeGrid::kTolerance)
            break;
        std::vector<double> w;
        if (change) w = numeraire_change_weight(s, s.measure(), m, s.grid()[i]);
        for (std::size_t p = 0; p < s.paths(); ++p) v[p] = stream.flow(p, i) * (change ? w[p] : 1.0);
        const auto e = detail::scenario_mean(s, v);
        out.times.push_back(s.grid()[i]);
        out.values.push_back(e.mean);
        out.std_errors.push_back(e.std_error);
    }
    return out;
}

// Physical-measure expectations: scenario probabilities of a finite-state set, or the simulation
// measure explicitly labelled as a proxy.
inline ExpectedCashFlowProfile expected_cashflows_p(const CashFlowStream& stream, const ScenarioSet& s,
                                                    bool allow_q_proxy = false) {
    if (!s.has_weights() && !allow_q_proxy)
        fail(ErrorCode::MissingInput, "physical expectations need scenario probabilities or the labelled proxy mode");
    auto out = expected_cashflows(stream, s, s.measure());
    out.convention = s.has_weights() ? EcConvention::EC_P : EcConvention::EC_Q_PROXY;
    out.measure.reset();
    return out;
}

// E_i = N(0) E(X_i / N(t_i)) / P(t_i;0).
inline ExpectedCashFlowProfile ec_per_bond(const CashFlowStream& stream, const ScenarioSet& s) {
    detail::check_stream(stream, s);
    ExpectedCashFlowProfile out;
    out.convention = EcConvention::EC_PER_BOND;
    std::vector<double> v(s.paths());
    for (std::size_t i = 1; i < s.times(); ++i) {
        const double bond0 = s.initial_bond(s.grid()[i]);
        for (std::size_t p = 0; p < s.paths(); ++p)
            v[p] = s.numeraire(p, 0) * stream.flow(p, i) / s.numeraire(p, i) / bond0;
        const auto e = detail::scenario_mean(s, v);
        out.times.push_back(s.grid()[i]);
        out.values.push_back(e.mean);
        out.std_errors.push_back(e.std_error);
    }
    return out;
}

// Sum of the per-bond expected cash-flows with a pathwise standard error.
inline Estimate ec_per_bond_total(const CashFlowStream& stream, const ScenarioSet& s) {
    detail::check_stream(stream, s);
    std::vector<double> bond0(s.times());
    for (std::size_t i = 1; i < s.times(); ++i) bond0[i] = s.initial_bond(s.grid()[i]);
    std::vector<double> v(s.paths(), 0.0);
    for (std::size_t p = 0; p < s.paths(); ++p)
        for (std::size_t i = 1; i < s.times(); ++i)
            v[p] += s.numeraire(p, 0) * stream.flow(p, i) / s.numeraire(p, i) / bond0[i];
    return detail::scenario_mean(s, v);
}

// E_i = E(X_i / N(t_i)) / E(1 / N(t_i)) for indicator streams.
inline ExpectedCashFlowProfile timing_weight_ratio(const CashFlowStream& stream, const ScenarioSet& s) {
    detail::check_stream(stream, s);
    for (std::size_t p = 0; p < s.paths(); ++p)
        for (std::size_t i = 1; i < s.times(); ++i) {
            const double x = stream.flow(p, i);
            require(x == 0.0 || x == 1.0, ErrorCode::InvalidSpec, "timing weights need indicator flows");
        }
    ExpectedCashFlowProfile out;
    out.convention = EcConvention::TIMING_RATIO;
    std::vector<double> num(s.paths()), den(s.paths()), lin(s.paths());
    for (std::size_t i = 1; i < s.times(); ++i) {
        for (std::size_t p = 0; p < s.paths(); ++p) {
            den[p] = 1.0 / s.numeraire(p, i);
            num[p] = stream.flow(p, i) * den[p];
        }
        const double a = detail::scenario_mean(s, num).mean;
        const double b = detail::scenario_mean(s, den).mean;
        const double ratio = a / b;
        for (std::size_t p = 0; p < s.paths(); ++p) lin[p] = (num[p] - ratio * den[p]) / b;
        out.times.push_back(s.grid()[i]);
        out.values.push_back(ratio);
        out.std_errors.push_back(s.has_weights() ? 0.0 : estimate(lin).std_error);
    }
    return out;
}

struct MeasureMixEstimate {
    Estimate expectation_difference;  // E^{T1}(L) - E^{T2}(L)
    Estimate bond_unit_residual;      // P(T1;0)/P(T2;0) E^{T1}(L) - E^{T2}(L)
    Estimate scaled_second_moment;    // (T2 - T1) E^{T2}(L^2)
};

// Forward rate fixed at T1 valued under the T1- and T2-bond measures of a Black scenario set.
inline MeasureMixEstimate measure_mix_monte_carlo(const ScenarioSet& s, double T1, double T2) {
    const auto i1 = s.grid().index_of(T1);
    const auto to = MeasureSpec::terminal_bond(T1);
    const auto w = numeraire_change_weight(s, s.measure(), to, T1);
    const double bond_ratio = s.initial_bond(T1) / s.initial_bond(T2);
    std::vector<double> diff(s.paths()), bond_unit(s.paths()), second(s.paths());
    for (std::size_t p = 0; p < s.paths(); ++p) {
        const double L = (s.ois_bond(p, i1, T1) / s.ois_bond(p, i1, T2) - 1.0) / (T2 - T1);
        diff[p] = L * w[p] - L;
        bond_unit[p] = bond_ratio * L * w[p] - L;
        second[p] = (T2 - T1) * L * L;
    }
    return {estimate(diff), estimate(bond_unit), estimate(second)};
}


} // namespace liquiforge
