#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "liquiforge/core/philox.hpp"
#include "liquiforge/funding/kappa.hpp"

namespace liquiforge {

enum class ResidualValue { BUCKET_SUM, DIRECT_REGRESSION };

struct ResidualOptions {
    ResidualValue value = ResidualValue::BUCKET_SUM;
    bool cash_balance = true;            // hold V(t_{i-1}) - sum phi P in the numeraire
    double init_tolerance = 5e-3;        // relative to max(|V(0)|, 1e-3) when cash_balance is off
};

// eps_i = V(t_i) - (H_i(t_i) - kappa_i) for i = 1..n-1, eps_n = 0.
struct ResidualSeries {
    TimeGrid grid;
    Eigen::MatrixXd epsilon;
    Eigen::MatrixXd hedge_value;  // H_i(t_i)
    Eigen::MatrixXd cash;         // balancing cash c_{i-1} carried into (t_{i-1}, t_i]
    double max_init_gap = 0.0;    // max |sum phi(t_{i-1}) P(t_{i-1}) - V(t_{i-1})|
};

inline ResidualSeries residual_series(const ValueProcess& v, const std::vector<HedgeProfile>& profiles,
                                      const KappaSeries& k, const ScenarioSet& s, const ResidualOptions& opt = {}) {
    require_same_grid(v.grid, s.grid(), "continuation residual");
    check_profiles(profiles, s);
    const Eigen::MatrixXd& value = opt.value == ResidualValue::BUCKET_SUM ? v.values : v.direct;
    const auto rows = static_cast<Eigen::Index>(s.paths());
    const auto cols = static_cast<Eigen::Index>(s.times());
    const std::size_t last = s.times() - 1;
    ResidualSeries r{s.grid(), Eigen::MatrixXd::Zero(rows, cols), Eigen::MatrixXd::Zero(rows, cols),
                     Eigen::MatrixXd::Zero(rows, cols), 0.0};
    const double tol = opt.init_tolerance * std::max(std::abs(value(0, 0)), 1e-3);
    for (std::size_t i = 1; i <= last; ++i) {
        const auto& h = profiles[i - 1];
        const auto ic = static_cast<Eigen::Index>(i);
        for (std::size_t p = 0; p < s.paths(); ++p) {
            const auto pp = static_cast<Eigen::Index>(p);
            const double gap = value(pp, ic - 1) - hedge_value(h, s, p, i - 1);
            r.max_init_gap = std::max(r.max_init_gap, std::abs(gap));
            const double c = opt.cash_balance ? gap : 0.0;
            double hv = c * s.numeraire(p, i) / s.numeraire(p, i - 1);
            for (std::size_t col = 0; col < h.maturities.size(); ++col) {
                const double u = h.units(pp, static_cast<Eigen::Index>(col));
                if (u != 0.0) hv += u * s.funding_bond(p, i, s.grid()[h.maturities[col]]);
            }
            r.cash(pp, ic) = c;
            r.hedge_value(pp, ic) = hv;
            r.epsilon(pp, ic) = i < last ? value(pp, ic) - (hv - k.kappa(pp, ic)) : 0.0;
        }
    }
    if (!opt.cash_balance && r.max_init_gap > tol)
        fail(ErrorCode::HedgeInitMismatch, "frozen hedge misses V(t_{i-1}) by " + std::to_string(r.max_init_gap) +
                                               " without a balancing position");
    return r;
}

struct KappaIdentity {
    Estimate pv_kappa;
    Estimate pv_residual;
    double v0 = 0.0;
    Estimate gap;  // pathwise N(0) sum (kappa - eps) / N - V(0)

    bool holds(double k = 3.0) const { return std::abs(gap.mean) <= k * gap.std_error + 1e-12 * std::max(1.0, std::abs(v0)); }
};

inline KappaIdentity pv_kappa_with_residual(const KappaSeries& k, const ResidualSeries& r, const ScenarioSet& s, double v0) {
    KappaIdentity out;
    out.v0 = v0;
    out.pv_kappa = pv_of_increments(k.kappa, s);
    out.pv_residual = pv_of_increments(r.epsilon, s);
    const Eigen::MatrixXd diff = k.kappa - r.epsilon;
    out.gap = pv_of_increments(diff, s);
    out.gap.mean -= v0;
    return out;
}

inline KappaIdentity pv_kappa_with_residual(const KappaSeries& k, const ResidualSeries& r, const ScenarioSet& s,
                                            const ValueProcess& v) {
    return pv_kappa_with_residual(k, r, s, v.v0());
}

// Full chain for one stream on one scenario set.
struct KappaRun {
    ValueProcess value;
    std::vector<HedgeProfile> profiles;
    KappaSeries kappa;
    ResidualSeries residual;
    KappaIdentity identity;
};

inline KappaRun run_kappa(const CashFlowStream& x, const ScenarioSet& s, const RegressionBasis& basis = {},
                          const ResidualOptions& opt = {}, unsigned threads = 1) {
    KappaRun run{conditional_value(x, s, basis, threads), {}, {}, {}, {}};
    run.profiles = hedge_profiles(run.value, s, std::nullopt, threads);
    run.kappa = kappa_series(run.value, run.profiles, s);
    run.residual = residual_series(run.value, run.profiles, run.kappa, s, opt);
    run.identity = pv_kappa_with_residual(run.kappa, run.residual, s, run.value);
    return run;
}

struct OrderRow {
    double mesh = 0.0;
    double pv_residual = 0.0;
    double std_err = 0.0;
};

struct OrderStudy {
    std::vector<OrderRow> rows;
    double slope = std::numeric_limits<double>::quiet_NaN();
    double slope_std_error = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

// Least-squares slope of log|y| on log x; NaN when any |y| is zero.
inline double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(std::abs(y[i]) > 0.0)) return std::numeric_limits<double>::quiet_NaN();
        mx += std::log(x[i]);
        my += std::log(std::abs(y[i]));
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(std::abs(y[i])) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

} // namespace detail

using StreamFactory = std::function<CashFlowStream(const ScenarioSet&)>;

// |pv_residual| against the mesh over base_grid and `halvings` refinements, all observed on the
// paths of `fine` so the coarse increments are sums of the fine ones.
inline OrderStudy residual_order_study(const StreamFactory& stream, const TimeGrid& base_grid, std::size_t halvings,
                                       const ScenarioSet& fine, const RegressionBasis& basis = {},
                                       const ResidualOptions& opt = {}, std::size_t bootstrap = 200,
                                       std::uint64_t bootstrap_seed = 1, unsigned threads = 1) {
    if (halvings + 1 < 3) fail(ErrorCode::InsufficientRefinements, "the order study needs at least three grids");
    std::vector<TimeGrid> grids{base_grid};
    for (std::size_t h = 0; h < halvings; ++h) grids.push_back(grids.back().refined());
    OrderStudy out;
    std::vector<std::vector<double>> per_path;
    std::vector<double> meshes, values;
    for (const auto& g : grids) {
        const auto s = fine.restrict_to(g);
        const auto run = run_kappa(stream(s), s, basis, opt, threads);
        std::vector<double> d(s.paths(), 0.0);
        for (std::size_t p = 0; p < s.paths(); ++p)
            for (std::size_t i = 1; i < s.times(); ++i)
                d[p] += s.numeraire(p, 0) * run.residual.epsilon(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(i)) /
                        s.numeraire(p, i);
        const auto e = estimate(d);
        out.rows.push_back({g.mesh(), e.mean, e.std_error});
        meshes.push_back(g.mesh());
        values.push_back(e.mean);
        per_path.push_back(std::move(d));
    }
    out.slope = detail::log_log_slope(meshes, values);
    if (bootstrap > 1 && std::isfinite(out.slope)) {
        const CounterRng rng(bootstrap_seed);
        const std::size_t n = fine.paths();
        std::vector<double> slopes;
        std::vector<double> resampled(grids.size());
        for (std::size_t b = 0; b < bootstrap; ++b) {
            std::fill(resampled.begin(), resampled.end(), 0.0);
            for (std::size_t k = 0; k < n; ++k) {
                const auto idx = std::min(n - 1, static_cast<std::size_t>(rng.uniform(b, static_cast<std::uint32_t>(k), 0) *
                                                                           static_cast<double>(n)));
                for (std::size_t g = 0; g < grids.size(); ++g) resampled[g] += per_path[g][idx];
            }
            const double sl = detail::log_log_slope(meshes, resampled);
            if (std::isfinite(sl)) slopes.push_back(sl);
        }
        if (slopes.size() > 1) out.slope_std_error = estimate(slopes).std_error * std::sqrt(static_cast<double>(slopes.size()));
    }
    return out;
}

} // namespace liquiforge
