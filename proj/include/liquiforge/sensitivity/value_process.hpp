#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "liquiforge/core/error.hpp"
#include "liquiforge/core/numerics.hpp"
#include "liquiforge/core/parallel.hpp"
#include "liquiforge/market/scenario_set.hpp"
#include "liquiforge/products/cashflow_stream.hpp"
#include "liquiforge/sensitivity/regression.hpp"

namespace liquiforge {

// Conditional values V(t_i) = sum_{j>i} F_j(t_i) P^f(t_j;t_i), where F_j(t_i) is the regressed
// forward value of X_j in units of the funding bond P^f(t_j). `direct` holds the single regression
// of the summed discounted flows for comparison.
struct ValueProcess {
    TimeGrid grid;
    RegressionBasis basis;
    MeasureSpec numeraire;
    Eigen::MatrixXd values;
    Eigen::MatrixXd direct;
    std::vector<std::size_t> flow_times;
    std::vector<Eigen::MatrixXd> forwards;
    double v0_std_error = 0.0;
    std::optional<Eigen::MatrixXd> settled;  // contractual flows, kept for finite-state replication

    std::size_t paths() const { return static_cast<std::size_t>(values.rows()); }
    double value(std::size_t p, std::size_t i) const {
        return values(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(i));
    }
    double v0() const { return values(0, 0); }

    // F_j(t_i) for flow time index j > i; zero for times without flows.
    double forward(std::size_t j, std::size_t p, std::size_t i) const {
        for (std::size_t k = 0; k < flow_times.size(); ++k)
            if (flow_times[k] == j) return forwards[k](static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(i));
        return 0.0;
    }
};

namespace detail {

// Weighted averages of Y within each information group at t_i (finite-state markets).
inline Eigen::MatrixXd group_average(const ScenarioSet& s, std::size_t i, const Eigen::MatrixXd& Y,
                                     const std::vector<std::uint8_t>& mask) {
    std::map<std::size_t, std::pair<Eigen::VectorXd, double>> acc;
    for (std::size_t p = 0; p < s.paths(); ++p) {
        if (!mask[p]) continue;
        const double w = s.has_weights() ? s.weights()[p] : 1.0;
        auto [it, fresh] = acc.try_emplace(s.information_group(p, i), Eigen::VectorXd::Zero(Y.cols()), 0.0);
        it->second.first += w * Y.row(static_cast<Eigen::Index>(p)).transpose();
        it->second.second += w;
    }
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(Y.rows(), Y.cols());
    for (std::size_t p = 0; p < s.paths(); ++p) {
        if (!mask[p]) continue;
        const auto& [sum, w] = acc.at(s.information_group(p, i));
        out.row(static_cast<Eigen::Index>(p)) = (sum / w).transpose();
    }
    return out;
}

inline Eigen::MatrixXd regress_slice(const ScenarioSet& s, std::size_t i, const Eigen::MatrixXd& Y,
                                     const std::vector<std::uint8_t>& mask, const RegressionBasis& basis, unsigned threads) {
    if (s.finite_state()) return group_average(s, i, Y, mask);
    const auto rows = static_cast<Eigen::Index>(s.paths());
    Eigen::VectorXd x = s.state_matrix().col(static_cast<Eigen::Index>(i));
    Eigen::VectorXd bond;
    if (basis.include_terminal_bond) {
        bond.resize(rows);
        const double T = s.grid().back();
        for (std::size_t p = 0; p < s.paths(); ++p) bond(static_cast<Eigen::Index>(p)) = s.funding_bond(p, i, T);
    }
    const SliceFit fit = fit_slice(x, basis.include_terminal_bond ? &bond : nullptr, Y, mask, basis);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows, Y.cols());
    parallel_for(s.paths(), threads, [&](std::size_t begin, std::size_t end) {
        Eigen::RowVectorXd r(fit.basis.columns());
        for (std::size_t p = begin; p < end; ++p) {
            if (!mask[p]) continue;
            const auto pp = static_cast<Eigen::Index>(p);
            fit.basis.row(x(pp), basis.include_terminal_bond ? bond(pp) : 0.0, [&](int k) -> double& { return r(k); });
            out.row(pp) = r * fit.beta;
        }
    });
    return out;
}

} // namespace detail

inline ValueProcess conditional_value(const CashFlowStream& x, const ScenarioSet& s, const RegressionBasis& basis = {},
                                      unsigned threads = 1) {
    require_same_grid(x.grid(), s.grid(), "conditional value");
    require(x.paths() == s.paths(), ErrorCode::GridMismatch, "stream and scenario set path counts differ");
    const std::size_t n = s.times();
    const auto rows = static_cast<Eigen::Index>(s.paths());
    ValueProcess v;
    v.grid = s.grid();
    v.basis = basis;
    v.numeraire = s.measure();
    v.values = Eigen::MatrixXd::Zero(rows, static_cast<Eigen::Index>(n));
    v.direct = v.values;
    v.flow_times = x.flow_times();
    v.forwards.assign(v.flow_times.size(), Eigen::MatrixXd::Zero(rows, static_cast<Eigen::Index>(n)));
    if (s.finite_state()) v.settled = x.flows();

    std::vector<std::uint8_t> mask(s.paths());
    for (std::size_t i = 0; i + 1 < n; ++i) {
        std::vector<std::size_t> known, unknown;
        for (std::size_t k = 0; k < v.flow_times.size(); ++k) {
            const auto j = v.flow_times[k];
            if (j <= i) continue;
            (x.fixing_index(j) <= i ? known : unknown).push_back(k);
        }
        if (known.empty() && unknown.empty()) continue;
        for (std::size_t p = 0; p < s.paths(); ++p) mask[p] = x.active(p, i) ? 1 : 0;

        Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(rows, static_cast<Eigen::Index>(1 + unknown.size()));
        const auto ic = static_cast<Eigen::Index>(i);
        parallel_for(s.paths(), threads, [&](std::size_t begin, std::size_t end) {
            for (std::size_t p = begin; p < end; ++p) {
                if (!mask[p]) continue;
                const auto pp = static_cast<Eigen::Index>(p);
                const double ni = s.numeraire(p, i);
                double known_value = 0.0;
                for (auto k : known) {
                    const auto j = v.flow_times[k];
                    const double xj = x.flow(p, j);
                    v.forwards[k](pp, ic) = xj;
                    if (xj != 0.0) known_value += xj * s.funding_bond(p, i, s.grid()[j]);
                }
                v.values(pp, ic) = known_value;
                for (std::size_t u = 0; u < unknown.size(); ++u) {
                    const auto j = v.flow_times[unknown[u]];
                    const double d = x.flow(p, j) * ni / s.numeraire(p, j);
                    Y(pp, 0) += d;
                    Y(pp, static_cast<Eigen::Index>(u + 1)) = d / s.funding_bond(p, i, s.grid()[j]);
                }
            }
        });
        if (unknown.empty()) {
            v.direct.col(ic) = v.values.col(ic);
            continue;
        }
        if (i == 0) {
            std::vector<double> y0(s.paths());
            for (std::size_t p = 0; p < s.paths(); ++p) y0[p] = Y(static_cast<Eigen::Index>(p), 0);
            v.v0_std_error = s.has_weights() ? 0.0 : estimate(y0).std_error;
        }
        const Eigen::MatrixXd fitted = detail::regress_slice(s, i, Y, mask, basis, threads);
        v.direct.col(ic) = v.values.col(ic) + fitted.col(0);
        for (std::size_t u = 0; u < unknown.size(); ++u)
            v.forwards[unknown[u]].col(ic) = fitted.col(static_cast<Eigen::Index>(u + 1));
        parallel_for(s.paths(), threads, [&](std::size_t begin, std::size_t end) {
            for (std::size_t p = begin; p < end; ++p) {
                if (!mask[p]) continue;
                const auto pp = static_cast<Eigen::Index>(p);
                for (auto k : unknown)
                    v.values(pp, ic) += v.forwards[k](pp, ic) * s.funding_bond(p, i, s.grid()[v.flow_times[k]]);
            }
        });
    }
    return v;
}

} // namespace liquiforge
