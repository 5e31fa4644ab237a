#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "../test_helpers.hpp"
#include "liquiforge/liquiforge.hpp"

using namespace liquiforge;
using testing_support::black;
using testing_support::gaussian;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        detail += (detail.empty() ? "" : "; ") + what + (ok ? "" : " [FAIL]");
    }
};

std::string num(double x) { return format_number(x); }

ModelSpec flat_model(double rate, double sigma, double spread, double a) {
    ModelSpec m;
    m.kind = ModelKind::GAUSSIAN_SHORT_RATE;
    m.gaussian = {a, sigma, DiscountCurve::flat(CurveKind::FUNDING, rate, 10.0, spread)};
    return m;
}

CashFlowStream constant_flow(const ScenarioSet& s, std::size_t j, double amount) {
    CashFlowStream x(s.grid(), s.paths(), "FLOW");
    for (std::size_t p = 0; p < s.paths(); ++p) x.set_flow(p, j, amount);
    x.set_fixing_index(j, 0);
    return x;
}

CashFlowStream bond_stream(const ScenarioSet& s, double T) {
    return unit_at_tau_stream(s, StoppingTimeSpec::deterministic(T));
}

Outcome two_state() {
    Outcome o;
    const TwoStateMarket m;
    const auto h = solve_two_state_hedge(m);
    o.require(std::abs(h.a - 1.8) <= 1e-12 && std::abs(h.b + 1.0) <= 1e-12, "a=" + num(h.a) + " b=" + num(h.b));
    const auto e = two_state_expected_flows(m, h);
    o.require(std::abs(e[0] - 1.3) <= 1e-12 && std::abs(e[1] + 1.5) <= 1e-12, "expected flows " + num(e[0]) + "/" + num(e[1]));
    const double net = two_state_scenario_flows(m, h).cwiseAbs().maxCoeff();
    o.require(net <= 1e-12, "max |net flow| " + num(net));
    const auto demo = run_demo("two-state-hedge");
    o.require(demo.passed(), "scenario-set replication agrees");
    return o;
}

Outcome measure_mix() {
    Outcome o;
    const double L0 = 0.03, sig = 0.2, T1 = 5.0, T2 = 5.5;
    const auto s = simulate(black(L0, sig, T1, T2), TimeGrid({0.0, T1, T2}), 1000000, 2024);
    const auto mm = measure_mix_monte_carlo(s, T1, T2);
    const auto& d = mm.expectation_difference;
    const auto& m2 = mm.scaled_second_moment;
    const double closed = measure_mix_residual_closed_form(L0, sig, T1, T2);
    o.require(within_std_errors(d.mean, m2.mean, combined_std_error(d.std_error, m2.std_error)),
              "E_T1(L)-E_T2(L)=" + num(d.mean) + " vs (T2-T1)E[L^2]=" + num(m2.mean));
    o.require(within_std_errors(d.mean, closed, d.std_error),
              "vs closed form " + num(closed) + " (se " + num(d.std_error) + ")");
    return o;
}

Outcome digital_sum() {
    Outcome o;
    const double L0 = 0.03, sig = 0.2, T1 = 5.0, T2 = 5.5;
    const auto s = simulate(black(L0, sig, T1, T2), TimeGrid({0.0, T1, T2}), 1000000, 77);
    for (double K : {0.02, 0.03, 0.045}) {
        const auto total = ec_per_bond_total(digital_pair_stream(s, T1, T2, K), s);
        const double closed = digital_sum_defect_closed_form(L0, K, sig, T1, T2);
        o.require(within_std_errors(total.mean - 1.0, closed, total.std_error),
                  "K=" + num(K) + " MC " + num(total.mean - 1.0) + " closed " + num(closed));
    }
    double worst_atm = 0.0, worst_bachelier = 0.0;
    for (double sd : {0.05, 0.1, 0.15, 0.2}) {
        const double sl = sd / std::sqrt(T1);
        const double exact = digital_sum_defect_closed_form(L0, L0, sl, T1, T2);
        worst_atm = std::max(worst_atm, std::abs(digital_atm_approximation(L0, sl, T1, T2) / exact - 1.0));
        worst_bachelier = std::max(worst_bachelier, std::abs(bachelier_atm_defect(L0, L0 * sl, T1, T2) / exact - 1.0));
    }
    const double exact = digital_sum_defect_closed_form(L0, L0, sig, T1, T2);
    worst_bachelier = std::max(worst_bachelier, std::abs(bachelier_atm_defect(L0, L0 * sig, T1, T2) / exact - 1.0));
    o.require(worst_atm <= 1e-2, "ATM approximation rel err " + num(worst_atm));
    o.require(worst_bachelier <= 1e-2, "Bachelier vs Black ATM rel err " + num(worst_bachelier));
    return o;
}

Outcome sensitivity_identity() {
    Outcome o;
    const auto spec = gaussian(0.1, 0.012);
    const TimeGrid grid = TimeGrid::uniform(5.0, 20);
    const auto s = simulate(spec, grid, 100000, 404);
    const std::vector<std::pair<std::string, std::function<CashFlowStream(const ScenarioSet&)>>> streams{
        {"bond", [](const ScenarioSet& g) { return bond_stream(g, 5.0); }},
        {"fra", [](const ScenarioSet& g) { return fra_stream(g, 2.0, 2.5, 0.03); }},
        {"caplet", [](const ScenarioSet& g) { return caplet_stream(g, 4.0, 4.5, 0.03); }}};
    double worst_rel = 0.0;
    for (const auto& [name, make] : streams) {
        const auto x = make(s);
        const auto pv_rn = testing_support::pv(x, s);
        for (const auto& row : sensitivity_report(x, s)) {
            const double scale = std::max(std::abs(row.adjoint), kLambdaBump);
            worst_rel = std::max(worst_rel, std::abs(row.bump - row.adjoint) / scale);
            // Independent run under the forward measure of the bucket maturity.
            auto fwd_spec = spec;
            fwd_spec.numeraire = NumeraireChoice::terminal_bond(row.bucket_time);
            const auto f = simulate(fwd_spec, TimeGrid::uniform(row.bucket_time, row.bucket), 100000, 405 + row.bucket);
            const auto y = make(f);
            std::vector<double> flows(f.paths());
            for (std::size_t p = 0; p < f.paths(); ++p) flows[p] = y.flow(p, row.bucket);
            const auto e = estimate(flows);
            const double bond = s.initial_bond(row.bucket_time);
            const double se = combined_std_error(pv_rn.std_error, bond * e.std_error);
            o.require(within_std_errors(row.adjoint, bond * e.mean, se) || std::abs(row.adjoint - bond * e.mean) <= 1e-12,
                      name + " t=" + num(row.bucket_time) + " -dV/dL " + num(row.adjoint) + " vs P E^T(X) " +
                          num(bond * e.mean) + " (se " + num(se) + ")");
        }
    }
    o.require(worst_rel <= 1e-6, "max adjoint/bump rel err " + num(worst_rel));
    return o;
}

Outcome predictable_flows() {
    Outcome o;
    const auto s = simulate(gaussian(0.1, 0.01), TimeGrid::uniform(5.0, 10), 20000, 505);
    std::vector<double> semi;
    for (int k = 2; k <= 10; ++k) semi.push_back(0.5 * k);
    const std::vector<CashFlowStream> streams{fra_stream(s, 2.0, 2.5, 0.03), caplet_stream(s, 4.0, 4.5, 0.03),
                                              swap_stream(s, semi, 0.03)};
    for (const auto& x : streams) {
        const auto v = conditional_value(x, s);
        double worst = 0.0;
        std::size_t checked = 0;
        for (std::size_t i = 1; i < s.times(); ++i) {
            if (!x.predictable(i) || x.flows().col(static_cast<Eigen::Index>(i)).cwiseAbs().maxCoeff() == 0.0) continue;
            const auto h = hedge_profile(v, s, i - 1);
            const double scale = std::max(x.flows().col(static_cast<Eigen::Index>(i)).cwiseAbs().maxCoeff(), 1e-12);
            for (std::size_t p = 0; p < s.paths(); ++p) worst = std::max(worst, std::abs(h.units_at(p, i) - x.flow(p, i)) / scale);
            ++checked;
        }
        o.require(checked > 0 && worst <= 5e-3, x.name() + " " + std::to_string(checked) + " bucket(s), max rel err " + num(worst));
    }
    return o;
}

Outcome kappa_identity() {
    Outcome o;
    const auto s = simulate(gaussian(0.1, 0.01), TimeGrid::uniform(5.0, 20), 100000, 606);
    const std::vector<CashFlowStream> streams{bond_stream(s, 5.0), fra_stream(s, 2.0, 2.5, 0.03),
                                              caplet_stream(s, 4.0, 4.5, 0.03)};
    for (const auto& x : streams) {
        const auto run = run_kappa(x, s);
        const auto& id = run.identity;
        const double lhs = id.pv_kappa.mean - id.v0;
        o.require(id.holds(), x.name() + " pv_kappa-V0 " + num(lhs) + " pv_residual " + num(id.pv_residual.mean) + " (se " +
                                  num(id.gap.std_error) + ")");
    }
    return o;
}

Outcome residual_order() {
    Outcome o;
    const auto spec = gaussian(0.1, 0.01);
    const TimeGrid base = TimeGrid::uniform(5.0, 10);
    const std::size_t halvings = 3;
    TimeGrid fine = base;
    for (std::size_t h = 0; h < halvings; ++h) fine = fine.refined();
    const auto s = simulate(spec, fine, 40000, 707);
    const auto caplet = residual_order_study([](const ScenarioSet& g) { return caplet_stream(g, 4.0, 4.5, 0.03); }, base,
                                             halvings, s, {}, {}, 100, 7);
    std::string rows;
    for (const auto& r : caplet.rows) rows += " " + num(r.mesh) + ":" + num(r.pv_residual);
    o.require(std::isfinite(caplet.slope) && caplet.slope >= 0.7 && caplet.slope <= 1.3,
              "caplet slope " + num(caplet.slope) + " (meshes" + rows + ")");
    const auto bond = residual_order_study([](const ScenarioSet& g) { return bond_stream(g, 5.0); }, base, halvings, s, {},
                                           {}, 0, 7);
    const double v0 = pv_contractual(bond_stream(s, 5.0), s).mean;
    bool small = true;
    double worst = 0.0;
    for (const auto& r : bond.rows) {
        small = small && std::abs(r.pv_residual) <= 3.0 * r.std_err + 10.0 * kBondBumpRelative * v0;
        worst = std::max(worst, std::abs(r.pv_residual));
    }
    o.require(small, "bond max |pv_residual| " + num(worst));
    return o;
}

Outcome lva_properties() {
    Outcome o;
    const auto s = simulate(flat_model(0.04, 0.003, 0.01, 0.2), TimeGrid::uniform(3.0, 12), 20000, 808);
    const auto x = caplet_stream(s, 2.0, 2.5, 0.05) + swap_stream(s, {1.0, 2.0, 3.0}, 0.05);
    const std::vector<double> gaps{1 / 365.0, 5 / 365.0, 10 / 365.0, 20 / 365.0};
    const auto run = run_kappa(x, s);
    double plus_err = 0.0;
    for (auto c : all_conventions()) {
        const auto split = split_increments({&x, &run.profiles, &run.kappa}, s, c);
        const auto rep = verify_sign_monotonicity(split, gaps, s);
        std::string lvas;
        for (double l : rep.lvas) lvas += " " + num(l);
        o.require(rep.rates_nonnegative && rep.sign_ok && rep.monotone_ok && rep.pathwise_ok,
                  to_string(c) + " LVA" + lvas);
        for (double g : gaps) {
            const double scale = std::max(1.0, split.plus.cwiseAbs().maxCoeff());
            plus_err = std::max(plus_err, lva(split, {g}, s).max_plus_form_error / scale);
        }
    }
    o.require(plus_err <= 1e-15, "plus-form max pathwise err " + num(plus_err));

    const auto det = simulate(flat_model(0.02, 0.0, 0.0, 0.2), TimeGrid({0.0, 1.0}), 4, 1);
    const auto single = lva(split_for_stream(constant_flow(det, 1, 1.0), det, NettingConvention::X), {2.0 / 365.0}, det);
    o.require(std::abs(single.lva + 1.07413146932e-4) <= 1e-9, "single inflow LVA " + num(single.lva));

    const auto split = split_for_stream(caplet_stream(s, 2.0, 2.5, 0.04), s, NettingConvention::X);
    std::vector<double> err;
    for (double days : {8.0, 4.0, 2.0, 1.0}) {
        const auto r = lva(split, {days / 365.0}, s);
        err.push_back(std::abs(r.lva - r.lva_first_order));
    }
    std::string ratios;
    bool quarters = true;
    for (std::size_t k = 1; k < err.size(); ++k) {
        const double q = err[k - 1] / err[k];
        ratios += " " + num(q);
        quarters = quarters && std::abs(q - 4.0) <= 0.2 * 4.0;
    }
    o.require(quarters, "first-order error ratios" + ratios);

    const GapFundingSpec g{5.0 / 365.0};
    const auto book = lva_nonlinearity_demo({fra_stream(s, 2.0, 2.5, 0.045), caplet_stream(s, 2.0, 2.5, 0.045).scaled(-1.0)}, g, s);
    o.require(book.portfolio >= book.sum_of_products,
              "portfolio LVA " + num(book.portfolio) + " >= sum " + num(book.sum_of_products));
    return o;
}

Outcome timing_mismatch() {
    Outcome o;
    double worst = 0.0;
    for (double l : {-0.5, 0.0, 0.3, 1.0})
        for (double bj : {0.9, 0.97}) {
            const TimingMismatchSpec m{1.0, 0.0, 1.0, l, 0.95, bj};
            const double fd = timing_mismatch_finite_difference(m);
            const double cf = timing_mismatch_closed_form(m).total();
            worst = std::max(worst, std::abs(fd / cf - 1.0));
        }
    o.require(worst <= 1e-3, "max rel err FD vs expected-flow + mismatch " + num(worst));
    const auto demo = run_demo("timing-mismatch");
    o.require(demo.passed(), "Monte Carlo rows within 3 se");
    return o;
}

Outcome determinism() {
    Outcome o;
    auto config = load_run_config(std::string(LIQUIFORGE_SOURCE_DIR) + "/configs/small.json");
    for (const auto& name : study_names()) {
        config.threads = 1;
        const auto a = run_study(name, config, "");
        config.threads = 4;
        const auto b = run_study(name, config, "");
        o.require(!a.manifest.entries.empty() && a.manifest_text == b.manifest_text,
                  name + " " + std::to_string(a.manifest.entries.size()) + " report(s)");
    }
    return o;
}

struct Criterion {
    int id;
    double budget_seconds;
    std::function<Outcome()> run;
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    int only = 0;
    app.add_option("--criterion", only, "Run one criterion (1-10)")->check(CLI::Range(1, 10));
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> criteria{{1, 1.0, two_state},           {2, 30.0, measure_mix},
                                          {3, 30.0, digital_sum},        {4, 60.0, sensitivity_identity},
                                          {5, 60.0, predictable_flows},  {6, 120.0, kappa_identity},
                                          {7, 300.0, residual_order},    {8, 120.0, lva_properties},
                                          {9, 30.0, timing_mismatch},    {10, 600.0, determinism}};
    bool all = true;
    for (const auto& c : criteria) {
        if (only && c.id != only) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.require(false, std::string("error: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        o.require(secs < c.budget_seconds, "runtime " + num(std::round(secs * 100.0) / 100.0) + "s < " + num(c.budget_seconds) + "s");
        std::printf("criterion %d: %s  %s\n", c.id, o.pass ? "PASS" : "FAIL", o.detail.c_str());
        all = all && o.pass;
    }
    return all ? 0 : 1;
}
