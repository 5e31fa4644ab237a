#pragma once

#include <cmath>
#include <cstdint>
#include <memory>

#include <Eigen/Dense>

#include "liquiforge/core/error.hpp"
#include "liquiforge/core/parallel.hpp"
#include "liquiforge/core/philox.hpp"
#include "liquiforge/market/model.hpp"
#include "liquiforge/market/scenario_set.hpp"

namespace liquiforge {

namespace detail {

inline ScenarioSet simulate_black(const ModelSpec& spec, const TimeGrid& grid, std::size_t n_paths, std::uint64_t seed,
                                  unsigned threads) {
    const auto& bp = spec.black;
    require(grid.size() == 3 && std::abs(grid[1] - bp.T1) <= TimeGrid::kTolerance &&
                std::abs(grid[2] - bp.T2) <= TimeGrid::kTolerance,
            ErrorCode::GridMismatch, "Black model grid must be {0, T1, T2}");
    auto model = std::make_shared<const BlackSinglePeriod>(bp);
    const auto rows = static_cast<Eigen::Index>(n_paths);
    Eigen::MatrixXd state(rows, 3), numeraire(rows, 3);
    const CounterRng rng(seed);
    const double p0 = bp.initial_discount_T1() * model->bond_ratio(bp.L0);
    const double sd = bp.sigma * std::sqrt(bp.T1);
    parallel_for(n_paths, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            const auto r = static_cast<Eigen::Index>(p);
            const double z = rng.normals(p, 1)[0];
            const double L = bp.L0 * std::exp(-0.5 * sd * sd + sd * z);
            state(r, 0) = bp.L0;
            state(r, 1) = L;
            state(r, 2) = L;
            numeraire(r, 0) = p0;
            numeraire(r, 1) = model->bond_ratio(L);
            numeraire(r, 2) = 1.0;
        }
    });
    return ScenarioSet(grid, seed, std::move(model), spec.numeraire, std::move(state), std::move(numeraire));
}

inline ScenarioSet simulate_gaussian(const ModelSpec& spec, const TimeGrid& grid, std::size_t n_paths, std::uint64_t seed,
                                     unsigned threads) {
    const double sigma = spec.kind == ModelKind::DETERMINISTIC ? 0.0 : spec.gaussian.volatility;
    auto model = std::make_shared<const GaussianShortRate>(spec.gaussian.mean_reversion, sigma, spec.gaussian.curve);
    require(grid.back() <= model->horizon() + TimeGrid::kTolerance, ErrorCode::OutOfCurveSupport,
            "simulation grid extends beyond the initial curve");
    const bool terminal = spec.numeraire.kind == NumeraireChoice::Kind::TERMINAL_BOND;
    const double T = spec.numeraire.maturity;
    if (terminal)
        require(std::abs(T - grid.back()) <= TimeGrid::kTolerance, ErrorCode::InvalidSpec,
                "terminal bond numeraire must mature at the last grid time");

    const std::size_t n = grid.size();
    std::vector<double> decay(n), sd_x(n), sd_i(n), rho(n), b(n), drift(n), account_base(n), spread(n);
    for (std::size_t i = 1; i < n; ++i) {
        const double h = grid[i] - grid[i - 1];
        decay[i] = model->state_decay(h);
        sd_x[i] = model->state_std(h);
        sd_i[i] = std::sqrt(model->integrated_variance(h));
        b[i] = model->B(h);
        rho[i] = (sd_x[i] > 0.0 && sd_i[i] > 0.0) ? model->state_integral_cov(h) / (sd_x[i] * sd_i[i]) : 0.0;
        drift[i] = terminal ? model->forward_drift(grid[i - 1], grid[i], T) : 0.0;
    }
    for (std::size_t i = 0; i < n; ++i) spread[i] = model->spread_integral(0.0, grid[i]);

    const auto rows = static_cast<Eigen::Index>(n_paths);
    Eigen::MatrixXd state(rows, static_cast<Eigen::Index>(n)), numeraire(rows, static_cast<Eigen::Index>(n));
    const CounterRng rng(seed);
    parallel_for(n_paths, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            const auto r = static_cast<Eigen::Index>(p);
            double x = 0.0, integral = 0.0;
            state(r, 0) = 0.0;
            numeraire(r, 0) = terminal ? model->funding_bond(0.0, T, 0.0) : 1.0;
            for (std::size_t i = 1; i < n; ++i) {
                const auto z = rng.normals(p, static_cast<std::uint32_t>(i));
                const double e1 = sd_x[i] * z[0];
                if (terminal) {
                    x = x * decay[i] - drift[i] + e1;
                } else {
                    const double e2 = sd_i[i] * (rho[i] * z[0] + std::sqrt(std::max(0.0, 1.0 - rho[i] * rho[i])) * z[1]);
                    integral += x * b[i] + e2;
                    x = x * decay[i] + e1;
                }
                const auto c = static_cast<Eigen::Index>(i);
                state(r, c) = x;
                numeraire(r, c) = terminal ? model->funding_bond(grid[i], T, x)
                                           : model->ois_account(grid[i], integral) * std::exp(spread[i]);
            }
        }
    });
    return ScenarioSet(grid, seed, std::move(model), spec.numeraire, std::move(state), std::move(numeraire));
}

} // namespace detail

inline ScenarioSet simulate(const ModelSpec& spec, const TimeGrid& grid, std::size_t n_paths, std::uint64_t seed,
                            unsigned threads = 1) {
    require(n_paths >= 1, ErrorCode::InvalidSpec, "n_paths must be >= 1");
    spec.validate();
    if (spec.kind == ModelKind::BLACK_SINGLE_PERIOD) return detail::simulate_black(spec, grid, n_paths, seed, threads);
    return detail::simulate_gaussian(spec, grid, n_paths, seed, threads);
}

} // namespace liquiforge
