#pragma once

#include <algorithm>
#include <cstdlib>
#include <string>
#include <vector>

#include "liquiforge/analytics/expected_cashflows.hpp"
#include "liquiforge/funding/residual.hpp"
#include "liquiforge/lva/lva.hpp"
#include "liquiforge/lva/netting.hpp"
#include "liquiforge/market/simulate.hpp"
#include "liquiforge/products/products.hpp"
#include "liquiforge/reporting/config.hpp"
#include "liquiforge/reporting/emit.hpp"
#include "liquiforge/reporting/manifest.hpp"
#include "liquiforge/sensitivity/lambda_buckets.hpp"

namespace liquiforge {

struct StudyResult {
    ReportManifest manifest;
    std::string manifest_text;
    std::vector<Table> tables;
    std::vector<std::string> failures;  // failing rows, one line each

    bool passed() const { return failures.empty(); }
};

inline const std::vector<std::string>& study_names() {
    static const std::vector<std::string> names{"sensitivities", "kappa", "lva", "convergence"};
    return names;
}

namespace study_detail {

inline bool nonlinear(ProductKind k) {
    return k == ProductKind::CAPLET || k == ProductKind::SWAPTION_PHYSICAL || k == ProductKind::SWAPTION_CASH ||
           k == ProductKind::DIGITAL_PAIR;
}

inline void require_products(const RunConfig& c) {
    if (c.products.empty()) fail(ErrorCode::ConfigInvalid, "/products: at least one product is required for this study");
}

struct Context {
    const RunConfig& config;
    StudyResult& result;

    void check(bool ok, const std::string& table, const std::string& row) {
        if (config.assertions && !ok) result.failures.push_back(table + ": " + row);
    }
};

inline void sensitivities(Context& ctx, const ScenarioSet& s) {
    const auto& c = ctx.config;
    Table t{"sensitivities",
            {"product", "bucket", "bucket_time", "bump", "adjoint", "analytic", "analytic_std_err", "rel_err", "pass"},
            {}};
    for (const auto& pc : c.products) {
        const auto x = product_stream(s, pc.spec);
        std::vector<double> se(s.times(), 0.0);
        auto analytic = [&](std::size_t k) -> std::optional<double> {
            const double T = s.grid()[k];
            const auto ec = expected_cashflows(x, s, MeasureSpec::terminal_bond(T));
            const double bond = s.initial_bond(T);
            se[k] = bond * ec.std_errors[k - 1];
            return bond * ec.values[k - 1];
        };
        for (const auto& row : sensitivity_report(x, s, kLambdaBump, analytic)) {
            const double tol = std::max(1e-6 * std::abs(row.adjoint), kLambdaBump * kLambdaBump);
            const bool ok = std::abs(row.bump - row.adjoint) <= tol &&
                            std::abs(row.adjoint - *row.analytic) <=
                                3.0 * se[row.bucket] + 1e-12 * std::max(1.0, std::abs(row.adjoint));
            t.add({pc.id, static_cast<long long>(row.bucket), row.bucket_time, row.bump, row.adjoint, *row.analytic,
                   se[row.bucket], row.rel_err, ok});
            ctx.check(ok, t.name, pc.id + " bucket " + std::to_string(row.bucket));
        }
    }
    ctx.result.tables.push_back(std::move(t));
}

inline void kappa(Context& ctx, const ScenarioSet& s) {
    const auto& c = ctx.config;
    Table id{"kappa_identity", {"product", "v0", "pv_kappa", "pv_residual", "gap", "std_err", "pass"}, {}};
    for (const auto& pc : c.products) {
        const auto x = product_stream(s, pc.spec);
        const auto run = run_kappa(x, s, c.basis, {}, c.threads);
        Table k{"kappa_" + pc.id, {"path_id", "time", "maturing_bucket_cash", "rebalancing_cash", "kappa"}, {}};
        const std::size_t shown = std::min(c.study.report_paths, s.paths());
        for (std::size_t p = 0; p < shown; ++p)
            for (std::size_t i = 1; i < s.times(); ++i)
                k.add({static_cast<long long>(p), s.grid()[i], run.kappa.maturing(p, i), run.kappa.rebalancing(p, i),
                       run.kappa.at(p, i)});
        ctx.result.tables.push_back(std::move(k));
        const auto& r = run.identity;
        const bool ok = r.holds();
        id.add({pc.id, r.v0, r.pv_kappa.mean, r.pv_residual.mean, r.gap.mean, r.gap.std_error, ok});
        ctx.check(ok, id.name, pc.id);
    }
    ctx.result.tables.push_back(std::move(id));
}

inline void lva_study(Context& ctx, const ScenarioSet& s) {
    const auto& c = ctx.config;
    Table t{"lva",
            {"product", "convention", "gap_days", "v0", "v_gapped", "lva", "lva_plus_form", "lva_first_order", "std_err",
             "max_plus_form_error", "pass"},
            {}};
    Table mono{"lva_monotonicity",
               {"product", "convention", "rates_nonnegative", "sign_ok", "monotone_ok", "pathwise_ok", "pass"},
               {}};
    std::vector<double> gaps;
    for (double d : c.gaps_days) gaps.push_back(d / kDaysPerYear);
    for (const auto& pc : c.products) {
        const auto x = product_stream(s, pc.spec);
        const bool chain = std::any_of(c.conventions.begin(), c.conventions.end(),
                                       [](NettingConvention v) { return v != NettingConvention::X; });
        std::optional<KappaRun> run;
        if (chain) run = run_kappa(x, s, c.basis, {}, c.threads);
        for (auto conv : c.conventions) {
            const NettingInputs in{&x, run ? &run->profiles : nullptr, run ? &run->kappa : nullptr};
            const auto split = split_increments(in, s, conv);
            for (std::size_t k = 0; k < gaps.size(); ++k) {
                const auto r = lva(split, {gaps[k], std::nullopt}, s);
                const double scale = std::max(1.0, split.plus.cwiseAbs().maxCoeff());
                const bool ok = r.max_plus_form_error <= 1e-12 * scale;
                t.add({pc.id, to_string(conv), c.gaps_days[k], r.v0, r.v_gapped, r.lva, r.lva_plus_form, r.lva_first_order,
                       r.std_error, r.max_plus_form_error, ok});
                ctx.check(ok, t.name, pc.id + " " + to_string(conv) + " gap " + format_number(c.gaps_days[k]));
            }
            if (gaps.size() > 0) {
                const auto rep = verify_sign_monotonicity(split, gaps, s);
                mono.add({pc.id, to_string(conv), rep.rates_nonnegative, rep.sign_ok, rep.monotone_ok, rep.pathwise_ok,
                          rep.passed()});
                ctx.check(rep.passed(), mono.name, pc.id + " " + to_string(conv));
            }
        }
    }
    ctx.result.tables.push_back(std::move(t));
    ctx.result.tables.push_back(std::move(mono));
}

inline void convergence(Context& ctx) {
    const auto& c = ctx.config;
    const TimeGrid base = TimeGrid::uniform(c.grid.times().back(), c.study.base_steps);
    TimeGrid fine = base;
    for (std::size_t h = 0; h < c.study.halvings; ++h) fine = fine.refined();
    const auto s = simulate(c.model, fine, c.paths, c.seed, c.threads);
    Table t{"convergence", {"product", "mesh", "pv_residual", "std_err", "slope_estimate"}, {}};
    Table summary{"convergence_summary", {"product", "criterion", "slope", "slope_std_err", "pass"}, {}};
    for (const auto& pc : c.products) {
        const auto spec = pc.spec;
        const StreamFactory factory = [spec](const ScenarioSet& g) { return product_stream(g, spec); };
        const auto study = residual_order_study(factory, base, c.study.halvings, s, c.basis, {}, c.study.bootstrap, c.seed,
                                                c.threads);
        for (const auto& row : study.rows) t.add({pc.id, row.mesh, row.pv_residual, row.std_err, study.slope});
        bool ok = true;
        std::string criterion;
        if (nonlinear(spec.kind)) {
            criterion = "slope in [0.7, 1.3]";
            ok = std::isfinite(study.slope) && study.slope >= 0.7 && study.slope <= 1.3;
        } else {
            // Allowance for the rounding of bumped hedge ratios.
            criterion = "residual within 3 std err of 0";
            const double v0 = std::abs(pv_contractual(product_stream(s, spec), s).mean);
            for (const auto& row : study.rows)
                ok = ok && std::abs(row.pv_residual) <= 3.0 * row.std_err + 10.0 * kBondBumpRelative * std::max(v0, 1e-3);
        }
        summary.add({pc.id, criterion, study.slope, study.slope_std_error, ok});
        ctx.check(ok, summary.name, pc.id + " " + criterion + " (slope " + format_number(study.slope) + ")");
    }
    ctx.result.tables.push_back(std::move(t));
    ctx.result.tables.push_back(std::move(summary));
}

} // namespace study_detail

// Runs one study and writes its reports plus manifest.json into `out_dir` (in memory when empty).
inline StudyResult run_study(const std::string& name, const RunConfig& config, const std::string& out_dir) {
    if (std::find(study_names().begin(), study_names().end(), name) == study_names().end())
        fail(ErrorCode::ConfigInvalid, "/study: unknown study '" + name + "'");
    study_detail::require_products(config);
    StudyResult result;
    study_detail::Context ctx{config, result};
    if (name == "convergence") {
        study_detail::convergence(ctx);
    } else {
        const auto s = simulate(config.model, config.grid, config.paths, config.seed, config.threads);
        if (name == "sensitivities") study_detail::sensitivities(ctx, s);
        else if (name == "kappa") study_detail::kappa(ctx, s);
        else study_detail::lva_study(ctx, s);
    }
    ReportWriter writer(out_dir, config.formats, config.hash);
    for (const auto& t : result.tables) writer.write(t);
    result.manifest = writer.manifest();
    result.manifest_text = writer.finish();
    return result;
}

} // namespace liquiforge
