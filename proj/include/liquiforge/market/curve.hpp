#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "liquiforge/core/error.hpp"
#include "liquiforge/market/time_grid.hpp"

namespace liquiforge {

enum class CurveKind { OIS, FUNDING };

// OIS discount factors (log-linear interpolation) plus a piecewise-constant funding spread.
class DiscountCurve {
public:
    using Node = std::pair<double, double>;

    DiscountCurve() : DiscountCurve(CurveKind::OIS, {{0.0, 1.0}}) {}

    DiscountCurve(CurveKind kind, std::vector<Node> nodes, std::vector<Node> spread = {})
        : kind_(kind), nodes_(std::move(nodes)), spread_(std::move(spread)) {
        std::sort(nodes_.begin(), nodes_.end());
        if (nodes_.empty() || std::abs(nodes_.front().first) > TimeGrid::kTolerance)
            nodes_.insert(nodes_.begin(), {0.0, 1.0});
        require(std::abs(nodes_.front().second - 1.0) <= 1e-14, ErrorCode::InvalidSpec, "discount factor at 0 must be 1");
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            require(nodes_[i].second > 0.0 && std::isfinite(nodes_[i].second), ErrorCode::InvalidSpec,
                    "discount factors must be positive");
            if (i > 0)
                require(nodes_[i].first > nodes_[i - 1].first, ErrorCode::InvalidSpec, "curve node times must be distinct");
        }
        std::sort(spread_.begin(), spread_.end());
        for (const auto& [t, l] : spread_)
            require(t >= 0.0 && std::isfinite(l), ErrorCode::InvalidSpec, "spread nodes need t >= 0 and finite lambda");
    }

    static DiscountCurve flat(CurveKind kind, double rate, double horizon, double spread = 0.0) {
        std::vector<Node> sp;
        if (spread != 0.0) sp.push_back({0.0, spread});
        return DiscountCurve(kind, {{0.0, 1.0}, {horizon, std::exp(-rate * horizon)}}, std::move(sp));
    }

    CurveKind kind() const { return kind_; }
    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<Node>& spread_nodes() const { return spread_; }
    double max_time() const { return nodes_.back().first; }

    DiscountCurve with_kind(CurveKind kind) const {
        DiscountCurve c = *this;
        c.kind_ = kind;
        return c;
    }

    double ois_discount(double T) const {
        require(T >= -TimeGrid::kTolerance, ErrorCode::NegativeTimeOrder, "negative maturity");
        if (T > max_time() + TimeGrid::kTolerance)
            fail(ErrorCode::OutOfCurveSupport, "maturity " + std::to_string(T) + " beyond curve support");
        if (T <= 0.0) return 1.0;
        auto hi = std::lower_bound(nodes_.begin(), nodes_.end(), T, [](const Node& n, double t) { return n.first < t; });
        if (hi == nodes_.end()) return nodes_.back().second;
        if (std::abs(hi->first - T) <= TimeGrid::kTolerance) return hi->second;
        auto lo = hi - 1;
        const double w = (T - lo->first) / (hi->first - lo->first);
        return std::exp((1.0 - w) * std::log(lo->second) + w * std::log(hi->second));
    }

    // Lambda(t, T) = integral of the spread over [t, T].
    double spread_integral(double t, double T) const {
        if (T < t) return -spread_integral(T, t);
        double total = 0.0;
        for (std::size_t j = 0; j < spread_.size(); ++j) {
            const double a = std::max(t, spread_[j].first);
            const double b = j + 1 < spread_.size() ? std::min(T, spread_[j + 1].first) : T;
            if (b > a) total += spread_[j].second * (b - a);
        }
        return total;
    }

    double discount(double T) const {
        const double p = ois_discount(T);
        return kind_ == CurveKind::OIS ? p : p * std::exp(-spread_integral(0.0, T));
    }

    bool has_node(double T) const {
        return std::any_of(nodes_.begin(), nodes_.end(),
                           [&](const Node& n) { return std::abs(n.first - T) <= TimeGrid::kTolerance; });
    }

    double node_discount(double T) const {
        if (!has_node(T)) fail(ErrorCode::NotOnGrid, "time " + std::to_string(T) + " is not a curve node");
        return discount(T);
    }

private:
    CurveKind kind_;
    std::vector<Node> nodes_;
    std::vector<Node> spread_;
};

inline double forward_rate(const DiscountCurve& curve, double T1, double T2) {
    const double p1 = curve.node_discount(T1);
    const double p2 = curve.node_discount(T2);
    require(T1 < T2, ErrorCode::Degenerate, "forward rate needs T1 < T2");
    return (p1 - p2) / ((T2 - T1) * p2);
}

// P^f(T;t) from the OIS bond implied by the model state at t.
inline double funding_bond(const DiscountCurve& curve, const TimeGrid& grid, double T, double t, double ois_bond) {
    grid.index_of(T);
    grid.index_of(t);
    require(t <= T + TimeGrid::kTolerance, ErrorCode::NegativeTimeOrder, "funding bond needs t <= T");
    require(curve.kind() == CurveKind::FUNDING, ErrorCode::InvalidSpec, "funding bond needs a FUNDING curve");
    if (std::abs(T - t) <= TimeGrid::kTolerance) return 1.0;
    return ois_bond * std::exp(-curve.spread_integral(t, T));
}

inline DiscountCurve curve_from_json(const nlohmann::json& j, CurveKind kind = CurveKind::FUNDING) {
    auto read_pairs = [](const nlohmann::json& arr) {
        std::vector<DiscountCurve::Node> out;
        for (const auto& p : arr) out.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
        return out;
    };
    std::vector<DiscountCurve::Node> spread;
    if (j.contains("spread")) spread = read_pairs(j.at("spread"));
    return DiscountCurve(kind, read_pairs(j.at("ois")), std::move(spread));
}

inline nlohmann::json curve_to_json(const DiscountCurve& c) {
    nlohmann::json j;
    j["ois"] = nlohmann::json::array();
    for (const auto& [t, p] : c.nodes()) j["ois"].push_back({t, p});
    j["spread"] = nlohmann::json::array();
    for (const auto& [t, l] : c.spread_nodes()) j["spread"].push_back({t, l});
    return j;
}

} // namespace liquiforge
