#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "liquiforge/analytics/closed_forms.hpp"
#include "liquiforge/analytics/expected_cashflows.hpp"
#include "liquiforge/core/error.hpp"
#include "liquiforge/core/numerics.hpp"
#include "liquiforge/core/philox.hpp"
#include "liquiforge/funding/kappa.hpp"
#include "liquiforge/funding/two_state.hpp"
#include "liquiforge/market/simulate.hpp"
#include "liquiforge/products/products.hpp"
#include "liquiforge/reporting/emit.hpp"
#include "liquiforge/sensitivity/hedge_profile.hpp"
#include "liquiforge/sensitivity/timing_mismatch.hpp"
#include "liquiforge/sensitivity/value_process.hpp"

namespace liquiforge {

using Overrides = std::map<std::string, std::string>;

struct DemoResult {
    Table table;
    bool passed() const {
        for (const auto& r : table.rows)
            if (!std::get<bool>(r.back())) return false;
        return true;
    }
};

inline const std::vector<std::string>& demo_names() {
    static const std::vector<std::string> names{"measure-mix", "digital-sum", "two-state-hedge", "timing-mismatch"};
    return names;
}

namespace demo_detail {

class Params {
public:
    Params(const Overrides& o, std::map<std::string, double> defaults) : values_(std::move(defaults)) {
        for (const auto& [k, v] : o) {
            if (!values_.count(k)) fail(ErrorCode::ConfigInvalid, "/override/" + k + ": unknown key");
            std::size_t used = 0;
            double x = 0.0;
            try {
                x = std::stod(v, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used == 0 || used != v.size() || !std::isfinite(x))
                fail(ErrorCode::ConfigInvalid, "/override/" + k + ": '" + v + "' is not a number");
            values_[k] = x;
        }
    }
    double operator[](const std::string& k) const { return values_.at(k); }
    std::size_t count(const std::string& k) const {
        const double v = values_.at(k);
        if (v < 1.0 || v != std::floor(v)) fail(ErrorCode::ConfigInvalid, "/override/" + k + ": expected a positive integer");
        return static_cast<std::size_t>(v);
    }

private:
    std::map<std::string, double> values_;
};

inline Table demo_table(const std::string& name) {
    return {name, {"quantity", "closed_form", "monte_carlo", "std_err", "pass"}, {}};
}

// Pass when within three standard errors, with a rounding allowance for exact quantities.
inline void add_row(Table& t, const std::string& q, double closed, double mc, double se, double abs_tol = 1e-12) {
    t.add({q, closed, mc, se, std::abs(mc - closed) <= 3.0 * se + abs_tol * std::max(1.0, std::abs(closed))});
}

inline void add_relative_row(Table& t, const std::string& q, double exact, double approx, double rel) {
    t.add({q, exact, approx, 0.0, std::abs(approx - exact) <= rel * std::abs(exact)});
}

inline ModelSpec black_spec(const Params& p) {
    ModelSpec m;
    m.kind = ModelKind::BLACK_SINGLE_PERIOD;
    m.black = {p["L0"], p["sigma"], p["T1"], p["T2"], std::nullopt};
    m.numeraire = NumeraireChoice::terminal_bond(p["T2"]);
    try {
        m.validate();
    } catch (const Error& e) {
        fail(ErrorCode::ConfigInvalid, std::string("/override: ") + e.what());
    }
    return m;
}

inline std::map<std::string, double> black_defaults(double paths) {
    return {{"L0", 0.03}, {"sigma", 0.2}, {"T1", 5.0}, {"T2", 5.5}, {"paths", paths}, {"seed", 1}, {"threads", 1}};
}

inline DemoResult measure_mix(const Overrides& o) {
    const Params p(o, black_defaults(1e6));
    const auto spec = black_spec(p);
    const double T1 = p["T1"], T2 = p["T2"], L0 = p["L0"], sig = p["sigma"];
    const auto s = simulate(spec, TimeGrid({0.0, T1, T2}), p.count("paths"), p.count("seed"), p.count("threads"));
    const auto mm = measure_mix_monte_carlo(s, T1, T2);
    const double second_moment = measure_mix_residual_closed_form(L0, sig, T1, T2);
    DemoResult r{demo_table("measure-mix")};
    add_row(r.table, "residual", measure_mix_expectation_difference(L0, sig, T1, T2), mm.expectation_difference.mean,
            mm.expectation_difference.std_error);
    add_row(r.table, "residual_vs_second_moment_form", second_moment, mm.expectation_difference.mean, mm.expectation_difference.std_error);
    add_row(r.table, "scaled_second_moment", second_moment, mm.scaled_second_moment.mean, mm.scaled_second_moment.std_error);
    add_row(r.table, "bond_unit_residual", second_moment, mm.bond_unit_residual.mean, mm.bond_unit_residual.std_error);
    return r;
}

inline DemoResult digital_sum(const Overrides& o) {
    auto defaults = black_defaults(5e5);
    defaults.insert({{"K_itm", 0.02}, {"K_otm", 0.045}});
    const Params p(o, defaults);
    const auto spec = black_spec(p);
    const double T1 = p["T1"], T2 = p["T2"], L0 = p["L0"], sig = p["sigma"];
    const auto s = simulate(spec, TimeGrid({0.0, T1, T2}), p.count("paths"), p.count("seed"), p.count("threads"));
    DemoResult r{demo_table("digital-sum")};
    const std::vector<std::pair<std::string, double>> strikes{{"itm", p["K_itm"]}, {"atm", L0}, {"otm", p["K_otm"]}};
    for (const auto& [tag, K] : strikes) {
        const auto total = ec_per_bond_total(digital_pair_stream(s, T1, T2, K), s);
        add_row(r.table, "defect_" + tag + "_K=" + format_number(K), digital_sum_defect_closed_form(L0, K, sig, T1, T2),
                total.mean - 1.0, total.std_error);
    }
    const double exact = digital_sum_defect_closed_form(L0, L0, sig, T1, T2);
    add_relative_row(r.table, "atm_approximation", exact, digital_atm_approximation(L0, sig, T1, T2), 1e-2);
    add_relative_row(r.table, "bachelier_atm", exact, bachelier_atm_defect(L0, L0 * sig, T1, T2), 1e-2);
    return r;
}

inline DemoResult two_state_hedge(const Overrides& o) {
    const Params p(o, {{"x1", 1.0}, {"x2", 0.8}, {"y1", 1.0}, {"y2", 0.9}, {"p1", 0.5}});
    const TwoStateMarket m{p["x1"], p["x2"], p["y1"], p["y2"], p["p1"]};
    const auto h = solve_two_state_hedge(m);
    const auto expected = two_state_expected_flows(m, h);
    const auto net = two_state_scenario_flows(m, h);

    // The same hedge recovered by replication on the scenario set.
    const auto s = two_state_scenario_set(m);
    const auto x = two_state_claim(s);
    const auto v = conditional_value(x, s);
    const auto prof = hedge_profiles(v, s);
    const auto k = kappa_series(v, prof, s);
    const double a = prof[0].units_at(0, 1), b = prof[0].units_at(0, 2);
    const double probs[2] = {m.p1, 1.0 - m.p1};

    DemoResult r{demo_table("two-state-hedge")};
    add_row(r.table, "a", h.a, a, 0.0);
    add_row(r.table, "b", h.b, b, 0.0);
    for (std::size_t i = 1; i <= 2; ++i) {
        double e = 0.0;
        for (std::size_t w = 0; w < 2; ++w) e += probs[w] * ((i == 1 ? a : b) - x.flow(w, i));
        add_row(r.table, "expected_flow_t" + std::to_string(i), expected[i - 1], e, 0.0);
    }
    for (std::size_t w = 0; w < 2; ++w) {
        double f = 0.0;
        for (std::size_t i = 1; i <= 2; ++i) f += k.at(w, i) - x.flow(w, i);
        add_row(r.table, "net_flow_w" + std::to_string(w + 1), net.row(static_cast<Eigen::Index>(w)).sum(), f, 0.0);
    }
    return r;
}

inline DemoResult timing_mismatch(const Overrides& o) {
    const Params p(o, {{"amount", 1.0},
                       {"mu", 0.0},
                       {"sigma", 1.0},
                       {"lambda", 0.0},
                       {"bond_i", 0.95},
                       {"bond_j", 0.9},
                       {"paths", 1e6},
                       {"seed", 1}});
    const TimingMismatchSpec m{p["amount"], p["mu"], p["sigma"], p["lambda"], p["bond_i"], p["bond_j"]};
    try {
        m.validate();
    } catch (const Error& e) {
        fail(ErrorCode::ConfigInvalid, std::string("/override: ") + e.what());
    }
    const auto cf = timing_mismatch_closed_form(m);

    // Common random numbers: the same Z drives both bumped valuations.
    const CounterRng rng(p.count("seed"));
    const std::size_t n = p.count("paths");
    const double h = 1e-2 * m.sigma, l = m.lambda;
    std::vector<double> total(n), flow(n), mismatch(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double z = m.mu + m.sigma * rng.normals(k, 0)[0];
        auto value = [&](double x) {
            return m.amount * (z > x ? m.bond_i * std::exp(-(x - l)) : m.bond_j);
        };
        total[k] = (value(l - h) - value(l + h)) / (2.0 * h);
        flow[k] = z > l ? m.amount * m.bond_i : 0.0;
        mismatch[k] = (z > l - h && z <= l + h) ? m.amount * (m.bond_i - m.bond_j) / (2.0 * h) : 0.0;
    }
    const auto et = estimate(total), ef = estimate(flow), em = estimate(mismatch);
    DemoResult r{demo_table("timing-mismatch")};
    add_row(r.table, "sensitivity", cf.total(), et.mean, et.std_error);
    add_row(r.table, "expected_flow_term", cf.expected_flow, ef.mean, ef.std_error);
    add_row(r.table, "mismatch_term", cf.mismatch, em.mean, em.std_error);
    add_relative_row(r.table, "finite_difference", cf.total(), timing_mismatch_finite_difference(m), 1e-3);
    return r;
}

} // namespace demo_detail

inline DemoResult run_demo(const std::string& name, const Overrides& overrides = {}) {
    if (name == "measure-mix") return demo_detail::measure_mix(overrides);
    if (name == "digital-sum") return demo_detail::digital_sum(overrides);
    if (name == "two-state-hedge") return demo_detail::two_state_hedge(overrides);
    if (name == "timing-mismatch") return demo_detail::timing_mismatch(overrides);
    fail(ErrorCode::UnknownDemo, "unknown demo '" + name + "'");
}

} // namespace liquiforge
