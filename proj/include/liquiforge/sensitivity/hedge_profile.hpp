#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "liquiforge/core/error.hpp"
#include "liquiforge/core/parallel.hpp"
#include "liquiforge/market/scenario_set.hpp"
#include "liquiforge/sensitivity/tape.hpp"
#include "liquiforge/sensitivity/value_process.hpp"

namespace liquiforge {

enum class HedgeMethod { BUMP, ADJOINT, REPLICATION };

// Units phi_j(t_i) of funding bonds P^f(t_j), t_j > t_i, held after trading at t_i.
struct HedgeProfile {
    std::size_t time_index = 0;
    std::vector<std::size_t> maturities;
    Eigen::MatrixXd units;                     // paths x maturities
    std::optional<Eigen::MatrixXd> collateral;  // collateral-account ratios; no dynamics attached

    std::optional<std::size_t> column(std::size_t j) const {
        const auto it = std::find(maturities.begin(), maturities.end(), j);
        if (it == maturities.end()) return std::nullopt;
        return static_cast<std::size_t>(it - maturities.begin());
    }
    double units_at(std::size_t p, std::size_t j) const {
        const auto c = column(j);
        return c ? units(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(*c)) : 0.0;
    }
    std::size_t paths() const { return static_cast<std::size_t>(units.rows()); }
};

inline constexpr double kBondBumpRelative = 1e-7;

namespace detail {

// Least-squares hedge at t_i matching V(t_{i+1}) + X_{i+1} across the successors of each group.
inline HedgeProfile replication_profile(const ValueProcess& v, const ScenarioSet& s, std::size_t i) {
    require(v.settled.has_value(), ErrorCode::MissingInput, "replication needs the contractual flows of a finite-state set");
    HedgeProfile h;
    h.time_index = i;
    for (std::size_t j = i + 1; j < s.times(); ++j) h.maturities.push_back(j);
    h.units = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(s.paths()), static_cast<Eigen::Index>(h.maturities.size()));
    if (h.maturities.empty()) return h;
    const std::size_t next = i + 1;
    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t p = 0; p < s.paths(); ++p) groups[s.information_group(p, i)].push_back(p);
    for (const auto& [g, members] : groups) {
        std::map<std::size_t, std::size_t> successors;
        for (auto p : members) successors.try_emplace(s.information_group(p, next), p);
        Eigen::MatrixXd A(static_cast<Eigen::Index>(successors.size()), static_cast<Eigen::Index>(h.maturities.size()));
        Eigen::VectorXd b(static_cast<Eigen::Index>(successors.size()));
        Eigen::Index r = 0;
        for (const auto& [sg, p] : successors) {
            for (std::size_t c = 0; c < h.maturities.size(); ++c)
                A(r, static_cast<Eigen::Index>(c)) = s.funding_bond(p, next, s.grid()[h.maturities[c]]);
            b(r) = v.value(p, next) + (*v.settled)(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(next));
            ++r;
        }
        const Eigen::VectorXd phi = A.completeOrthogonalDecomposition().solve(b);
        for (auto p : members) h.units.row(static_cast<Eigen::Index>(p)) = phi.transpose();
    }
    return h;
}

} // namespace detail

// phi_j(t_i) = dV(t_i)/dP^f(t_j;t_i) with V(t_i) = sum_j F_j(t_i) P^f(t_j;t_i) as the value function
// in the bond inputs. Finite-state sets default to one-step replication.
inline HedgeProfile hedge_profile(const ValueProcess& v, const ScenarioSet& s, std::size_t i,
                                  std::optional<HedgeMethod> method = std::nullopt, unsigned threads = 1) {
    require_same_grid(v.grid, s.grid(), "hedge profile");
    require(i < s.times(), ErrorCode::NotOnGrid, "hedge time index beyond grid");
    const HedgeMethod m = method.value_or(s.finite_state() ? HedgeMethod::REPLICATION : HedgeMethod::BUMP);
    if (m == HedgeMethod::REPLICATION) return detail::replication_profile(v, s, i);

    HedgeProfile h;
    h.time_index = i;
    std::vector<std::size_t> cols;
    for (std::size_t k = 0; k < v.flow_times.size(); ++k)
        if (v.flow_times[k] > i) {
            h.maturities.push_back(v.flow_times[k]);
            cols.push_back(k);
        }
    const auto ic = static_cast<Eigen::Index>(i);
    h.units = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(s.paths()), static_cast<Eigen::Index>(cols.size()));
    if (cols.empty()) return h;

    parallel_for(s.paths(), threads, [&](std::size_t begin, std::size_t end) {
        std::vector<double> bonds(cols.size()), fwd(cols.size());
        Tape tape;
        std::vector<Var> in(cols.size());
        for (std::size_t p = begin; p < end; ++p) {
            const auto pp = static_cast<Eigen::Index>(p);
            for (std::size_t c = 0; c < cols.size(); ++c) {
                bonds[c] = s.funding_bond(p, i, s.grid()[h.maturities[c]]);
                fwd[c] = v.forwards[cols[c]](pp, ic);
            }
            if (m == HedgeMethod::BUMP) {
                auto value = [&](const std::vector<double>& b) {
                    double w = 0.0;
                    for (std::size_t c = 0; c < b.size(); ++c) w += b[c] * fwd[c];
                    return w;
                };
                const double base = value(bonds);
                for (std::size_t c = 0; c < cols.size(); ++c) {
                    const double bump = kBondBumpRelative * bonds[c];
                    auto shifted = bonds;
                    shifted[c] += bump;
                    h.units(pp, static_cast<Eigen::Index>(c)) = (value(shifted) - base) / bump;
                }
            } else {
                tape.clear();
                for (std::size_t c = 0; c < cols.size(); ++c) in[c] = tape.variable(bonds[c]);
                Var w = in[0] * fwd[0];
                for (std::size_t c = 1; c < cols.size(); ++c) w = w + in[c] * fwd[c];
                tape.backpropagate(w);
                for (std::size_t c = 0; c < cols.size(); ++c) h.units(pp, static_cast<Eigen::Index>(c)) = tape.adjoint(in[c]);
            }
        }
    });
    return h;
}

inline std::vector<HedgeProfile> hedge_profiles(const ValueProcess& v, const ScenarioSet& s,
                                                std::optional<HedgeMethod> method = std::nullopt, unsigned threads = 1) {
    std::vector<HedgeProfile> out;
    out.reserve(s.times());
    for (std::size_t i = 0; i < s.times(); ++i) out.push_back(hedge_profile(v, s, i, method, threads));
    return out;
}

// Value of the hedge positions at t_i: sum_j phi_j(t_i) P^f(t_j;t_i).
inline double hedge_value(const HedgeProfile& h, const ScenarioSet& s, std::size_t p, std::size_t i) {
    double w = 0.0;
    for (std::size_t c = 0; c < h.maturities.size(); ++c) {
        const double u = h.units(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(c));
        if (u != 0.0) w += u * s.funding_bond(p, i, s.grid()[h.maturities[c]]);
    }
    return w;
}

// Largest |sum_j phi_j P^f(t_j) - V(t_i)| over paths.
inline double replication_mismatch(const HedgeProfile& h, const ValueProcess& v, const ScenarioSet& s) {
    double worst = 0.0;
    for (std::size_t p = 0; p < s.paths(); ++p)
        worst = std::max(worst, std::abs(hedge_value(h, s, p, h.time_index) - v.value(p, h.time_index)));
    return worst;
}

// delta_j(t_i) = phi_j(t_i) - phi_j(t_{i-1}) over maturities still alive after t_i.
struct RebalancingVector {
    std::size_t time_index = 0;
    std::vector<std::size_t> maturities;
    Eigen::MatrixXd deltas;  // paths x maturities

    double delta(std::size_t p, std::size_t j) const {
        for (std::size_t c = 0; c < maturities.size(); ++c)
            if (maturities[c] == j) return deltas(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(c));
        return 0.0;
    }
};

inline RebalancingVector rebalancing_deltas(const HedgeProfile& prev, const HedgeProfile& cur) {
    require(cur.time_index == prev.time_index + 1, ErrorCode::MaturitySetMismatch, "profiles are not on consecutive times");
    require(cur.paths() == prev.paths(), ErrorCode::MaturitySetMismatch, "profiles have different path counts");
    std::vector<std::size_t> alive;
    for (auto j : prev.maturities)
        if (j > cur.time_index) alive.push_back(j);
    for (auto j : cur.maturities)
        if (std::find(alive.begin(), alive.end(), j) == alive.end())
            fail(ErrorCode::MaturitySetMismatch, "maturity " + std::to_string(j) + " appears without a prior position");
    RebalancingVector r;
    r.time_index = cur.time_index;
    r.maturities = alive;
    r.deltas.resize(static_cast<Eigen::Index>(cur.paths()), static_cast<Eigen::Index>(alive.size()));
    for (std::size_t c = 0; c < alive.size(); ++c) {
        const auto pc = prev.column(alive[c]);
        const auto cc = cur.column(alive[c]);
        for (std::size_t p = 0; p < cur.paths(); ++p) {
            const auto pp = static_cast<Eigen::Index>(p);
            r.deltas(pp, static_cast<Eigen::Index>(c)) =
                (cc ? cur.units(pp, static_cast<Eigen::Index>(*cc)) : 0.0) - prev.units(pp, static_cast<Eigen::Index>(*pc));
        }
    }
    return r;
}

} // namespace liquiforge
