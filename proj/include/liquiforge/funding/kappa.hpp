#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "liquiforge/analytics/expected_cashflows.hpp"
#include "liquiforge/core/error.hpp"
#include "liquiforge/market/scenario_set.hpp"
#include "liquiforge/products/cashflow_stream.hpp"
#include "liquiforge/sensitivity/hedge_profile.hpp"
#include "liquiforge/sensitivity/value_process.hpp"

namespace liquiforge {

// Net cash settled at t_i under the funding-desk boundary; column 0 is unused.
struct KappaSeries {
    TimeGrid grid;
    std::string convention = "FUNDING_DESK";
    Eigen::MatrixXd maturing;     // phi_i(t_{i-1})
    Eigen::MatrixXd rebalancing;  // sum_{j>i} delta_j(t_i) P^f(t_j;t_i)
    Eigen::MatrixXd kappa;

    std::size_t paths() const { return static_cast<std::size_t>(kappa.rows()); }
    double at(std::size_t p, std::size_t i) const {
        return kappa(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(i));
    }
};

inline void check_profiles(const std::vector<HedgeProfile>& profiles, const ScenarioSet& s) {
    if (profiles.size() < s.times())
        fail(ErrorCode::MissingProfile, "need a hedge profile at each of the " + std::to_string(s.times()) + " grid times, got " +
                                            std::to_string(profiles.size()));
    for (std::size_t i = 0; i < s.times(); ++i) {
        if (profiles[i].time_index != i) fail(ErrorCode::MissingProfile, "hedge profile for t_" + std::to_string(i) + " missing");
        if (profiles[i].paths() != s.paths()) fail(ErrorCode::MissingProfile, "hedge profile path count differs from scenarios");
    }
}

// kappa_i = phi_i(t_{i-1}) - sum_{j>i} delta_j(t_i) P^f(t_j;t_i).
inline KappaSeries kappa_series(const std::vector<HedgeProfile>& profiles, const ScenarioSet& s) {
    check_profiles(profiles, s);
    const auto rows = static_cast<Eigen::Index>(s.paths());
    const auto cols = static_cast<Eigen::Index>(s.times());
    KappaSeries k{s.grid(), "FUNDING_DESK", Eigen::MatrixXd::Zero(rows, cols), Eigen::MatrixXd::Zero(rows, cols),
                  Eigen::MatrixXd::Zero(rows, cols)};
    for (std::size_t i = 1; i < s.times(); ++i) {
        for (auto j : profiles[i - 1].maturities)
            require(j >= i, ErrorCode::MaturitySetMismatch, "position in a bond that matured before t_i");
        const auto delta = rebalancing_deltas(profiles[i - 1], profiles[i]);
        const auto ic = static_cast<Eigen::Index>(i);
        for (std::size_t p = 0; p < s.paths(); ++p) {
            const auto pp = static_cast<Eigen::Index>(p);
            double reb = 0.0;
            for (std::size_t c = 0; c < delta.maturities.size(); ++c) {
                const double d = delta.deltas(pp, static_cast<Eigen::Index>(c));
                if (d != 0.0) reb += d * s.funding_bond(p, i, s.grid()[delta.maturities[c]]);
            }
            k.maturing(pp, ic) = profiles[i - 1].units_at(p, i);
            k.rebalancing(pp, ic) = reb;
            k.kappa(pp, ic) = k.maturing(pp, ic) - reb;
        }
    }
    return k;
}

inline KappaSeries kappa_series(const ValueProcess& v, const std::vector<HedgeProfile>& profiles, const ScenarioSet& s) {
    require_same_grid(v.grid, s.grid(), "kappa series");
    return kappa_series(profiles, s);
}

// Wider strategy boundary: contractual flows settled on top of kappa.
inline KappaSeries with_contractual_flows(KappaSeries k, const CashFlowStream& x) {
    require_same_grid(k.grid, x.grid(), "kappa series");
    k.kappa += x.flows();
    k.kappa.col(0).setZero();
    k.convention = "FUNDING_DESK_WITH_CONTRACTUAL";
    return k;
}

// N(0) E(sum_{i>=1} m(p, i) / N(t_i)) with a pathwise standard error.
inline Estimate pv_of_increments(const Eigen::MatrixXd& m, const ScenarioSet& s, std::size_t last = SIZE_MAX) {
    require(m.rows() == static_cast<Eigen::Index>(s.paths()) && m.cols() == static_cast<Eigen::Index>(s.times()),
            ErrorCode::GridMismatch, "increment matrix does not match the scenario set");
    const std::size_t end = std::min(last, s.times() - 1);
    std::vector<double> v(s.paths(), 0.0);
    for (std::size_t p = 0; p < s.paths(); ++p)
        for (std::size_t i = 1; i <= end; ++i)
            v[p] += s.numeraire(p, 0) * m(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(i)) / s.numeraire(p, i);
    return detail::scenario_mean(s, v);
}

// Deal value N(0) E(sum X_i / N(t_i)).
inline Estimate pv_contractual(const CashFlowStream& x, const ScenarioSet& s) {
    require_same_grid(x.grid(), s.grid(), "contractual present value");
    require(x.paths() == s.paths(), ErrorCode::GridMismatch, "stream and scenario set path counts differ");
    return pv_of_increments(x.flows(), s);
}

} // namespace liquiforge
