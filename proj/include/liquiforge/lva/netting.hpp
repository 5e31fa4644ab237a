#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "liquiforge/core/error.hpp"
#include "liquiforge/funding/residual.hpp"
#include "liquiforge/market/scenario_set.hpp"
#include "liquiforge/products/cashflow_stream.hpp"
#include "liquiforge/sensitivity/hedge_profile.hpp"

namespace liquiforge {

enum class NettingConvention { X, PHI, REB, KAPPA };

inline std::string to_string(NettingConvention c) {
    switch (c) {
    case NettingConvention::X: return "X";
    case NettingConvention::PHI: return "PHI";
    case NettingConvention::REB: return "REB";
    case NettingConvention::KAPPA: return "KAPPA";
    }
    return "?";
}

inline NettingConvention netting_convention_from_string(const std::string& s) {
    if (s == "X") return NettingConvention::X;
    if (s == "PHI") return NettingConvention::PHI;
    if (s == "REB") return NettingConvention::REB;
    if (s == "KAPPA") return NettingConvention::KAPPA;
    fail(ErrorCode::InvalidSpec, "unknown netting convention '" + s + "'");
}

inline const std::vector<NettingConvention>& all_conventions() {
    static const std::vector<NettingConvention> all{NettingConvention::X, NettingConvention::PHI, NettingConvention::REB,
                                                    NettingConvention::KAPPA};
    return all;
}

// Positive and negative parts per (path, time); column 0 is unused.
struct SplitIncrementSeries {
    NettingConvention convention = NettingConvention::X;
    TimeGrid grid;
    Eigen::MatrixXd plus;
    Eigen::MatrixXd minus;

    Eigen::MatrixXd net() const { return plus - minus; }
    std::size_t paths() const { return static_cast<std::size_t>(plus.rows()); }
};

struct NettingInputs {
    const CashFlowStream* stream = nullptr;
    const std::vector<HedgeProfile>* profiles = nullptr;
    const KappaSeries* kappa = nullptr;
};

inline SplitIncrementSeries split_increments(const NettingInputs& in, const ScenarioSet& s, NettingConvention c) {
    const auto rows = static_cast<Eigen::Index>(s.paths());
    const auto cols = static_cast<Eigen::Index>(s.times());
    SplitIncrementSeries out{c, s.grid(), Eigen::MatrixXd::Zero(rows, cols), Eigen::MatrixXd::Zero(rows, cols)};
    auto put = [&](Eigen::Index p, Eigen::Index i, double v) {
        out.plus(p, i) += std::max(v, 0.0);
        out.minus(p, i) += std::max(-v, 0.0);
    };
    switch (c) {
    case NettingConvention::X: {
        if (!in.stream) fail(ErrorCode::MissingInput, "convention X needs the contractual stream");
        require_same_grid(in.stream->grid(), s.grid(), "netting split");
        for (Eigen::Index p = 0; p < rows; ++p)
            for (Eigen::Index i = 1; i < cols; ++i) put(p, i, in.stream->flows()(p, i));
        break;
    }
    case NettingConvention::PHI: {
        if (!in.profiles) fail(ErrorCode::MissingInput, "convention PHI needs hedge profiles");
        check_profiles(*in.profiles, s);
        for (Eigen::Index p = 0; p < rows; ++p)
            for (Eigen::Index i = 1; i < cols; ++i)
                put(p, i, (*in.profiles)[static_cast<std::size_t>(i - 1)].units_at(static_cast<std::size_t>(p), static_cast<std::size_t>(i)));
        break;
    }
    case NettingConvention::REB: {
        if (!in.profiles) fail(ErrorCode::MissingInput, "convention REB needs hedge profiles");
        check_profiles(*in.profiles, s);
        for (std::size_t i = 1; i < s.times(); ++i) {
            const auto d = rebalancing_deltas((*in.profiles)[i - 1], (*in.profiles)[i]);
            for (std::size_t p = 0; p < s.paths(); ++p)
                for (std::size_t k = 0; k < d.maturities.size(); ++k) {
                    const double delta = d.deltas(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(k));
                    if (delta != 0.0)
                        put(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(i),
                            -delta * s.funding_bond(p, i, s.grid()[d.maturities[k]]));
                }
        }
        break;
    }
    case NettingConvention::KAPPA: {
        if (!in.kappa) fail(ErrorCode::MissingInput, "convention KAPPA needs the kappa series");
        require_same_grid(in.kappa->grid, s.grid(), "netting split");
        for (Eigen::Index p = 0; p < rows; ++p)
            for (Eigen::Index i = 1; i < cols; ++i) put(p, i, in.kappa->kappa(p, i));
        break;
    }
    }
    return out;
}

// Runs the valuation chain when the convention needs it.
inline SplitIncrementSeries split_for_stream(const CashFlowStream& x, const ScenarioSet& s, NettingConvention c,
                                             const RegressionBasis& basis = {}, unsigned threads = 1) {
    if (c == NettingConvention::X) return split_increments({&x, nullptr, nullptr}, s, c);
    const auto run = run_kappa(x, s, basis, {}, threads);
    return split_increments({&x, &run.profiles, &run.kappa}, s, c);
}

} // namespace liquiforge
