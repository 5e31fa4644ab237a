#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "liquiforge/core/error.hpp"
#include "liquiforge/core/numerics.hpp"
#include "liquiforge/market/scenario_set.hpp"
#include "liquiforge/products/cashflow_stream.hpp"
#include "liquiforge/sensitivity/tape.hpp"

namespace liquiforge {

inline constexpr double kLambdaBump = 1e-6;
inline constexpr double kMinimumBump = 1e-9;

// Lambda indexed by grid position; Lambda[0] is never used.
using LambdaValuation = std::function<double(const std::vector<double>&)>;

namespace detail {

// N(0) E(X_i / N(t_i)) per grid time; weighted when the set carries weights.
inline std::vector<double> discounted_flow_means(const CashFlowStream& x, const ScenarioSet& s) {
    require_same_grid(x.grid(), s.grid(), "bucket sensitivity");
    if (x.lambda_dependent())
        fail(ErrorCode::NonIndependentStream, "stream '" + x.name() + "' declares dependence on the funding spread");
    std::vector<double> d(s.times(), 0.0), terms(s.paths());
    double wsum = 0.0;
    if (s.has_weights())
        for (double w : s.weights()) wsum += w;
    for (std::size_t i = 1; i < s.times(); ++i) {
        for (std::size_t p = 0; p < s.paths(); ++p) {
            const double w = s.has_weights() ? s.weights()[p] * static_cast<double>(s.paths()) / wsum : 1.0;
            terms[p] = w * x.flow(p, i) / s.numeraire(p, i);
        }
        d[i] = s.numeraire(0, 0) * pairwise_sum(terms) / static_cast<double>(s.paths());
    }
    return d;
}

} // namespace detail

inline LambdaValuation lambda_valuation(const CashFlowStream& x, const ScenarioSet& s) {
    auto d = detail::discounted_flow_means(x, s);
    return [d = std::move(d)](const std::vector<double>& lambda) {
        require(lambda.size() == d.size(), ErrorCode::GridMismatch, "one spread bucket per grid time");
        double v = 0.0;
        for (std::size_t i = 1; i < d.size(); ++i) v += d[i] * std::exp(-lambda[i]);
        return v;
    };
}

// -dV/dLambda_k by central differences around the baseline Lambda = 0.
inline double lambda_bucket_sensitivity_bump(const LambdaValuation& valuation, std::size_t k, std::size_t buckets,
                                             double h = kLambdaBump) {
    if (!(h >= kMinimumBump)) fail(ErrorCode::BumpTooSmall, "bump " + std::to_string(h) + " is below 1e-9");
    require(k > 0 && k < buckets, ErrorCode::NotOnGrid, "bucket index outside the flow grid");
    std::vector<double> up(buckets, 0.0), down(buckets, 0.0);
    up[k] = h;
    down[k] = -h;
    return (valuation(down) - valuation(up)) / (2.0 * h);
}

// Reverse sweep over V = sum_i D_i exp(-Lambda_i) recorded at the baseline.
class LambdaTape {
public:
    LambdaTape(const CashFlowStream& x, const ScenarioSet& s) : means_(detail::discounted_flow_means(x, s)) {
        inputs_.reserve(means_.size());
        for (std::size_t i = 0; i < means_.size(); ++i) inputs_.push_back(tape_.variable(0.0));
        Var v = tape_.variable(0.0) * 0.0;
        for (std::size_t i = 1; i < means_.size(); ++i) v = v + exp(-inputs_[i]) * means_[i];
        value_ = v.value;
        tape_.backpropagate(v);
    }

    double value() const { return value_; }
    std::size_t buckets() const { return means_.size(); }
    double sensitivity(std::size_t k) const {
        require(k > 0 && k < means_.size(), ErrorCode::NotOnGrid, "bucket index outside the flow grid");
        return -tape_.adjoint(inputs_[k]);
    }

private:
    std::vector<double> means_;
    Tape tape_;
    std::vector<Var> inputs_;
    double value_ = 0.0;
};

inline double lambda_bucket_sensitivity_adjoint(const LambdaTape& tape, std::size_t k) { return tape.sensitivity(k); }

struct SensitivityRow {
    std::size_t bucket = 0;
    double bucket_time = 0.0;
    double bump = 0.0;
    double adjoint = 0.0;
    std::optional<double> analytic;
    double rel_err = 0.0;
};

using SensitivityReport = std::vector<SensitivityRow>;

// Rows for every bucket carrying a flow; rel_err compares bump to adjoint.
inline SensitivityReport sensitivity_report(const CashFlowStream& x, const ScenarioSet& s, double h = kLambdaBump,
                                            const std::function<std::optional<double>(std::size_t)>& analytic = {}) {
    const auto valuation = lambda_valuation(x, s);
    const LambdaTape tape(x, s);
    SensitivityReport out;
    for (auto k : x.flow_times()) {
        if (k == 0) continue;
        SensitivityRow r;
        r.bucket = k;
        r.bucket_time = s.grid()[k];
        r.bump = lambda_bucket_sensitivity_bump(valuation, k, s.times(), h);
        r.adjoint = tape.sensitivity(k);
        if (analytic) r.analytic = analytic(k);
        r.rel_err = std::abs(r.bump - r.adjoint) / std::max(std::abs(r.adjoint), 1e-300);
        out.push_back(r);
    }
    return out;
}

} // namespace liquiforge
