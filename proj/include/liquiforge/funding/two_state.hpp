#pragma once

#include <array>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "liquiforge/core/error.hpp"
#include "liquiforge/market/scenario_set.hpp"
#include "liquiforge/products/cashflow_stream.hpp"

namespace liquiforge {

// Two scenarios revealed at t1; x = (P(t1;t1), P(t2;t1)) in w1, y the same in w2.
struct TwoStateMarket {
    double x1 = 1.0, x2 = 0.8;
    double y1 = 1.0, y2 = 0.9;
    double p1 = 0.5;

    double determinant() const { return y1 * x2 - y2 * x1; }

    void validate() const {
        for (double v : {x1, x2, y1, y2})
            require(v > 0.0 && v <= 1.0, ErrorCode::InvalidSpec, "bond values must lie in (0, 1]");
        require(p1 >= 0.0 && p1 <= 1.0, ErrorCode::InvalidSpec, "probability of w1 must lie in [0, 1]");
    }
};

struct TwoStateHedge {
    double a = 0.0;  // units of the t1 bond
    double b = 0.0;  // units of the t2 bond
};

// Static portfolio worth the claim at t1: 1 paid at t1 in w1, 1 paid at t2 in w2.
inline TwoStateHedge solve_two_state_hedge(const TwoStateMarket& m) {
    m.validate();
    const double det = m.determinant();
    if (det == 0.0) fail(ErrorCode::SingularMarket, "the two bonds cannot distinguish the scenarios");
    return {m.y2 * (m.x2 - m.x1) / det, m.x1 * (m.y1 - m.y2) / det};
}

// P-expected flows at (t1, t2) of the short claim plus the static hedge held to maturity.
inline std::array<double, 2> two_state_expected_flows(const TwoStateMarket& m, const TwoStateHedge& h) {
    return {h.a - 1.0 * m.p1, h.b - 1.0 * (1.0 - m.p1)};
}

// Net flows per (scenario, time) of the short claim plus the dynamic hedge: at t1 the t2 position
// is rebalanced to the remaining claim.
inline Eigen::Matrix2d two_state_scenario_flows(const TwoStateMarket& m, const TwoStateHedge& h) {
    Eigen::Matrix2d f;
    const double hold_w1 = 0.0, hold_w2 = 1.0;
    f(0, 0) = h.a * m.x1 - 1.0 - (hold_w1 - h.b) * m.x2;
    f(0, 1) = hold_w1 - 0.0;
    f(1, 0) = h.a * m.y1 - 0.0 - (hold_w2 - h.b) * m.y2;
    f(1, 1) = hold_w2 - 1.0;
    return f;
}

// Scenario set on {0, 1, 2} under the t2-bond measure with pricing weights (q1, 1 - q1).
inline ScenarioSet two_state_scenario_set(const TwoStateMarket& m, double bond2_today = 0.8, double q1 = 0.5) {
    m.validate();
    require(bond2_today > 0.0 && bond2_today <= 1.0, ErrorCode::InvalidSpec, "t2 bond price must lie in (0, 1]");
    require(q1 > 0.0 && q1 < 1.0, ErrorCode::InvalidSpec, "pricing weights must be strictly inside (0, 1)");
    const TimeGrid grid({0.0, 1.0, 2.0});
    const double bond1_today = bond2_today * (q1 * m.x1 / m.x2 + (1.0 - q1) * m.y1 / m.y2);
    std::vector<Eigen::MatrixXd> bonds(3, Eigen::MatrixXd::Zero(2, 3));
    for (Eigen::Index p = 0; p < 2; ++p) {
        bonds[0](p, 0) = 1.0;
        bonds[0](p, 1) = bond1_today;
        bonds[0](p, 2) = bond2_today;
        bonds[1](p, 1) = p == 0 ? m.x1 : m.y1;
        bonds[1](p, 2) = p == 0 ? m.x2 : m.y2;
        bonds[2](p, 2) = 1.0;
    }
    Eigen::MatrixXd numeraire(2, 3);
    numeraire << bond2_today, m.x2, 1.0, bond2_today, m.y2, 1.0;
    auto s = ScenarioSet::tabulated(grid, std::move(bonds), std::move(numeraire), NumeraireChoice::terminal_bond(2.0),
                                    {q1, 1.0 - q1});
    s.set_information_groups({{0, 0}, {0, 1}, {0, 1}});
    return s;
}

// The claim: 1 at t1 in w1, 1 at t2 in w2; the payment date is known at t1.
inline CashFlowStream two_state_claim(const ScenarioSet& s) {
    CashFlowStream x(s.grid(), s.paths(), "TWO_STATE_CLAIM");
    x.set_flow(0, 1, 1.0);
    x.set_flow(1, 2, 1.0);
    x.set_fixing_index(2, 1);
    return x;
}

} // namespace liquiforge
