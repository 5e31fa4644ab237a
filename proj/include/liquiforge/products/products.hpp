#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "liquiforge/core/error.hpp"
#include "liquiforge/core/philox.hpp"
#include "liquiforge/market/scenario_set.hpp"
#include "liquiforge/products/cashflow_stream.hpp"

namespace liquiforge {

// Simple forward rate for [T1, T2] observed at grid index i from OIS bonds.
inline double libor_fixing(const ScenarioSet& s, std::size_t p, std::size_t i, double T1, double T2) {
    return (s.ois_bond(p, i, T1) / s.ois_bond(p, i, T2) - 1.0) / (T2 - T1);
}

namespace detail {

inline void check_period(const ScenarioSet& s, double T1, double T2) {
    s.grid().index_of(T1);
    s.grid().index_of(T2);
    require(T1 < T2, ErrorCode::Degenerate, "period needs T1 < T2");
}

inline void check_schedule(const ScenarioSet& s, const std::vector<double>& schedule) {
    if (schedule.size() < 2) fail(ErrorCode::EmptySchedule, "schedule needs at least one period");
    for (std::size_t k = 0; k < schedule.size(); ++k) {
        s.grid().index_of(schedule[k]);
        if (k > 0) require(schedule[k] > schedule[k - 1], ErrorCode::InvalidSpec, "schedule must be increasing");
    }
}

} // namespace detail

inline CashFlowStream fra_stream(const ScenarioSet& s, double T1, double T2, double K, bool accrual = false) {
    detail::check_period(s, T1, T2);
    const auto i1 = s.grid().index_of(T1), i2 = s.grid().index_of(T2);
    const double tau = accrual ? T2 - T1 : 1.0;
    CashFlowStream out(s.grid(), s.paths(), "FRA");
    out.set_fixing_index(i2, i1);
    for (std::size_t p = 0; p < s.paths(); ++p) out.set_flow(p, i2, tau * (libor_fixing(s, p, i1, T1, T2) - K));
    return out;
}

inline CashFlowStream caplet_stream(const ScenarioSet& s, double T1, double T2, double K, bool accrual = false) {
    detail::check_period(s, T1, T2);
    const auto i1 = s.grid().index_of(T1), i2 = s.grid().index_of(T2);
    const double tau = accrual ? T2 - T1 : 1.0;
    CashFlowStream out(s.grid(), s.paths(), "CAPLET");
    out.set_fixing_index(i2, i1);
    for (std::size_t p = 0; p < s.paths(); ++p)
        out.set_flow(p, i2, tau * std::max(libor_fixing(s, p, i1, T1, T2) - K, 0.0));
    return out;
}

// Strike at which the swap on `schedule` (same accrual convention) is worth zero at index i.
inline double swap_rate(const ScenarioSet& s, std::size_t p, std::size_t i, const std::vector<double>& schedule,
                        bool accrual = false) {
    double floating = 0.0, annuity = 0.0;
    for (std::size_t k = 0; k + 1 < schedule.size(); ++k) {
        const double dt = schedule[k + 1] - schedule[k];
        const double w = accrual ? dt : 1.0;
        const double p0 = s.ois_bond(p, i, schedule[k]);
        const double p1 = s.ois_bond(p, i, schedule[k + 1]);
        floating += w * (p0 - p1) / (dt * p1) * p1;
        annuity += w * p1;
    }
    return floating / annuity;
}

inline CashFlowStream swap_stream(const ScenarioSet& s, const std::vector<double>& schedule, double K, bool accrual = false) {
    detail::check_schedule(s, schedule);
    CashFlowStream out(s.grid(), s.paths(), "SWAP");
    for (std::size_t k = 0; k + 1 < schedule.size(); ++k) {
        const auto ik = s.grid().index_of(schedule[k]), ie = s.grid().index_of(schedule[k + 1]);
        const double w = accrual ? schedule[k + 1] - schedule[k] : 1.0;
        out.set_fixing_index(ie, ik);
        for (std::size_t p = 0; p < s.paths(); ++p)
            out.set_flow(p, ie, w * (libor_fixing(s, p, ik, schedule[k], schedule[k + 1]) - K));
    }
    return out;
}

inline CashFlowStream swaption_physical_stream(const ScenarioSet& s, double Te, const std::vector<double>& schedule,
                                               double K, bool accrual = false) {
    detail::check_schedule(s, schedule);
    const auto ie = s.grid().index_of(Te);
    require(Te <= schedule.front() + TimeGrid::kTolerance, ErrorCode::InvalidSpec, "exercise after first period start");
    CashFlowStream out = swap_stream(s, schedule, K, accrual);
    out.set_name("SWAPTION_PHYSICAL");
    ActiveMask active = ActiveMask::Ones(static_cast<Eigen::Index>(s.paths()), static_cast<Eigen::Index>(s.times()));
    for (std::size_t p = 0; p < s.paths(); ++p) {
        const bool exercised = swap_rate(s, p, ie, schedule, accrual) > K;
        if (exercised) continue;
        for (std::size_t i = 1; i < s.times(); ++i) out.set_flow(p, i, 0.0);
        for (std::size_t i = ie; i < s.times(); ++i) active(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(i)) = 0;
    }
    out.set_active_mask(std::move(active));
    return out;
}

inline CashFlowStream swaption_cash_stream(const ScenarioSet& s, double Te, const std::vector<double>& schedule, double K,
                                           bool accrual = false) {
    detail::check_schedule(s, schedule);
    const auto ie = s.grid().index_of(Te);
    require(Te <= schedule.front() + TimeGrid::kTolerance, ErrorCode::InvalidSpec, "exercise after first period start");
    require(ie > 0, ErrorCode::InvalidSpec, "exercise must be after t_0");
    CashFlowStream out(s.grid(), s.paths(), "SWAPTION_CASH");
    for (std::size_t p = 0; p < s.paths(); ++p) {
        if (!(swap_rate(s, p, ie, schedule, accrual) > K)) continue;
        double v = 0.0;
        for (std::size_t k = 0; k + 1 < schedule.size(); ++k) {
            const double w = accrual ? schedule[k + 1] - schedule[k] : 1.0;
            v += w * (libor_fixing(s, p, ie, schedule[k], schedule[k + 1]) - K) * s.ois_bond(p, ie, schedule[k + 1]);
        }
        out.set_flow(p, ie, v);
    }
    return out;
}

inline CashFlowStream digital_pair_stream(const ScenarioSet& s, double T1, double T2, double K) {
    detail::check_period(s, T1, T2);
    const auto i1 = s.grid().index_of(T1), i2 = s.grid().index_of(T2);
    CashFlowStream out(s.grid(), s.paths(), "DIGITAL_PAIR");
    out.set_fixing_index(i2, i1);
    for (std::size_t p = 0; p < s.paths(); ++p) {
        const double x1 = libor_fixing(s, p, i1, T1, T2) > K ? 1.0 : 0.0;
        out.set_flow(p, i1, x1);
        out.set_flow(p, i2, 1.0 - x1);
    }
    return out;
}

/// Read-only view of one path that only reveals information up to the current time index.
class PathView {
public:
    PathView(const ScenarioSet& s, std::size_t path, std::size_t now) : s_(s), path_(path), now_(now) {}

    std::size_t now() const { return now_; }
    double time(std::size_t k) const { return s_.grid()[k]; }
    std::size_t last_index() const { return s_.grid().last_index(); }

    double state(std::size_t k) const {
        check(k);
        return s_.state(path_, k);
    }
    double ois_bond(std::size_t k, double T) const {
        check(k);
        return s_.ois_bond(path_, k, T);
    }
    double funding_bond(std::size_t k, double T) const {
        check(k);
        return s_.funding_bond(path_, k, T);
    }
    // Draw from a stream independent of the rate model.
    double coin(std::size_t k) const {
        check(k);
        return CounterRng(s_.seed() ^ 0x9E3779B97F4A7C15ull).uniform(path_, static_cast<std::uint32_t>(k), 0xC0140u);
    }

private:
    void check(std::size_t k) const {
        if (k > now_)
            fail(ErrorCode::NonAdaptedTrigger, "trigger read time index " + std::to_string(k) + " at time index " +
                                                   std::to_string(now_));
    }

    const ScenarioSet& s_;
    std::size_t path_;
    std::size_t now_;
};

struct StoppingTimeSpec {
    std::function<bool(const PathView&)> trigger;
    std::optional<double> deterministic_time;
    std::string description = "CUSTOM";

    static StoppingTimeSpec deterministic(double T) {
        return {[T](const PathView& v) { return std::abs(v.time(v.now()) - T) <= TimeGrid::kTolerance; }, T,
                "DETERMINISTIC"};
    }
    // First time the model state exceeds `level`.
    static StoppingTimeSpec state_above(double level) {
        return {[level](const PathView& v) { return v.state(v.now()) > level; }, std::nullopt, "STATE_ABOVE"};
    }
    // Independent coin with per-step success probability.
    static StoppingTimeSpec coin(double probability) {
        return {[probability](const PathView& v) { return v.coin(v.now()) < probability; }, std::nullopt, "COIN"};
    }
    static StoppingTimeSpec custom(std::function<bool(const PathView&)> f) { return {std::move(f), std::nullopt, "CUSTOM"}; }
};

// tau(omega) as a grid index in 1..n; t_n when the trigger never fires.
inline std::vector<std::size_t> stopping_indices(const ScenarioSet& s, const StoppingTimeSpec& tau) {
    if (tau.deterministic_time) {
        const auto k = s.grid().index_of(*tau.deterministic_time);
        require(k > 0, ErrorCode::InvalidSpec, "stopping time must be after t_0");
        return std::vector<std::size_t>(s.paths(), k);
    }
    const std::size_t n = s.grid().last_index();
    std::vector<std::size_t> out(s.paths(), n);
    for (std::size_t p = 0; p < s.paths(); ++p)
        for (std::size_t i = 1; i < n; ++i)
            if (tau.trigger(PathView(s, p, i))) {
                out[p] = i;
                break;
            }
    return out;
}

inline CashFlowStream unit_at_tau_stream(const ScenarioSet& s, const StoppingTimeSpec& tau) {
    const auto idx = stopping_indices(s, tau);
    const std::size_t n = s.grid().last_index();
    CashFlowStream out(s.grid(), s.paths(), "UNIT_AT_TAU");
    ActiveMask active = ActiveMask::Zero(static_cast<Eigen::Index>(s.paths()), static_cast<Eigen::Index>(s.times()));
    for (std::size_t p = 0; p < s.paths(); ++p) {
        out.set_flow(p, idx[p], 1.0);
        for (std::size_t i = 0; i < idx[p]; ++i) active(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(i)) = 1;
    }
    if (tau.deterministic_time) {
        for (std::size_t i = 1; i <= n; ++i) out.set_fixing_index(i, 0);
    } else if (n > 1) {
        out.set_fixing_index(n, n - 1);
    }
    out.set_active_mask(std::move(active));
    return out;
}

enum class ProductKind { FRA, CAPLET, SWAP, SWAPTION_PHYSICAL, SWAPTION_CASH, UNIT_AT_TAU, DIGITAL_PAIR };

struct ProductSpec {
    ProductKind kind = ProductKind::FRA;
    double strike = 0.0;
    std::vector<double> schedule;
    std::optional<double> exercise;
    std::optional<StoppingTimeSpec> tau;
    double notional = 1.0;
    bool accrual = false;
};

inline CashFlowStream product_stream(const ScenarioSet& s, const ProductSpec& spec) {
    auto period = [&]() {
        if (spec.schedule.size() != 2) fail(ErrorCode::InvalidSpec, "single-period product needs schedule [T1, T2]");
    };
    auto exercise = [&]() {
        if (!spec.exercise) fail(ErrorCode::InvalidSpec, "swaption needs an exercise time");
        return *spec.exercise;
    };
    CashFlowStream out = [&]() {
        switch (spec.kind) {
        case ProductKind::FRA: period(); return fra_stream(s, spec.schedule[0], spec.schedule[1], spec.strike, spec.accrual);
        case ProductKind::CAPLET:
            period();
            return caplet_stream(s, spec.schedule[0], spec.schedule[1], spec.strike, spec.accrual);
        case ProductKind::SWAP: return swap_stream(s, spec.schedule, spec.strike, spec.accrual);
        case ProductKind::SWAPTION_PHYSICAL:
            return swaption_physical_stream(s, exercise(), spec.schedule, spec.strike, spec.accrual);
        case ProductKind::SWAPTION_CASH: return swaption_cash_stream(s, exercise(), spec.schedule, spec.strike, spec.accrual);
        case ProductKind::UNIT_AT_TAU:
            if (!spec.tau) fail(ErrorCode::InvalidSpec, "UNIT_AT_TAU needs a stopping time");
            return unit_at_tau_stream(s, *spec.tau);
        case ProductKind::DIGITAL_PAIR: period(); return digital_pair_stream(s, spec.schedule[0], spec.schedule[1], spec.strike);
        }
        fail(ErrorCode::InvalidSpec, "unknown product kind");
    }();
    return spec.notional == 1.0 ? out : out.scaled(spec.notional);
}

} // namespace liquiforge
