#include <gtest/gtest.h>

#include "liquiforge/lva/lva.hpp"
#include "liquiforge/products/products.hpp"
#include "test_helpers.hpp"

using namespace liquiforge;
using namespace testing_support;

namespace {

ModelSpec flat_model(double rate, double sigma = 0.0, double spread = 0.0, double a = 0.2) {
    ModelSpec m;
    m.kind = ModelKind::GAUSSIAN_SHORT_RATE;
    m.gaussian = {a, sigma, DiscountCurve::flat(CurveKind::FUNDING, rate, 10.0, spread)};
    return m;
}

CashFlowStream constant_flow(const ScenarioSet& s, std::size_t j, double amount, const char* name = "FLOW") {
    CashFlowStream x(s.grid(), s.paths(), name);
    for (std::size_t p = 0; p < s.paths(); ++p) x.set_flow(p, j, amount);
    x.set_fixing_index(j, 0);
    return x;
}

const ScenarioSet& positive_rate_paths() {
    static const ScenarioSet s = simulate(flat_model(0.04, 0.003, 0.01), TimeGrid::uniform(3.0, 12), 20000, 61);
    return s;
}

} // namespace

TEST(Lva, DeterministicSingleInflowOracle) {
    const auto s = simulate(flat_model(0.02), TimeGrid({0.0, 1.0}), 4, 1);
    const auto split = split_for_stream(constant_flow(s, 1, 1.0), s, NettingConvention::X);
    const GapFundingSpec g{2.0 / 365.0};
    EXPECT_NEAR(gap_discounts(g, s)(0, 1), 0.999890416964, 1e-12);
    const auto r = lva(split, g, s);
    EXPECT_NEAR(r.v0, std::exp(-0.02), 1e-15);
    EXPECT_NEAR(r.lva, -1.07413146932e-4, 1e-15);
    EXPECT_NEAR(r.lva_first_order, -1.07419032691e-4, 1e-15);
    EXPECT_LT(std::abs(r.lva - r.lva_first_order), 1.2e-8);
    EXPECT_NEAR(r.lva, r.lva_plus_form, 1e-16);
    EXPECT_NEAR(r.per_time[0].contribution, r.lva, 1e-16);
}

TEST(Lva, FlatRateOverride) {
    const auto s = simulate(flat_model(0.02), TimeGrid({0.0, 1.0}), 2, 1);
    const auto split = split_for_stream(constant_flow(s, 1, 1.0), s, NettingConvention::X);
    const auto r = lva(split, {2.0 / 365.0, 0.02}, s);
    EXPECT_NEAR(r.lva, -1.07413146932e-4, 1e-15);
}

TEST(Lva, TrivialCases) {
    const auto s = simulate(flat_model(0.03), TimeGrid::uniform(2.0, 4), 3, 1);
    const auto in = split_for_stream(constant_flow(s, 2, 1.0), s, NettingConvention::X);
    EXPECT_EQ(lva(in, {0.0}, s).lva, 0.0);
    EXPECT_EQ(lva_first_order(in, {0.0}, s), 0.0);

    const auto out = split_for_stream(constant_flow(s, 2, -1.0), s, NettingConvention::X);
    EXPECT_EQ(out.plus.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(lva(out, {5.0 / 365.0}, s).lva, 0.0);

    const auto z = simulate(flat_model(0.0), TimeGrid::uniform(2.0, 4), 3, 1);
    const auto zs = split_for_stream(constant_flow(z, 3, 2.0), z, NettingConvention::X);
    EXPECT_EQ((gapped_increments(zs, {30.0 / 365.0}, z) - zs.net()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Lva, ConventionXAnchorsContractualValue) {
    const auto& s = positive_rate_paths();
    const auto x = fra_stream(s, 1.5, 1.75, 0.045);
    const auto split = split_for_stream(x, s, NettingConvention::X);
    EXPECT_EQ(value_split(split.net(), s).mean, pv_contractual(x, s).mean);
}

TEST(Lva, DeterministicMarketXMatchesKappa) {
    const auto s = simulate(flat_model(0.03, 0.0, 0.005), TimeGrid::uniform(3.0, 12), 5, 1);
    const auto x = swap_stream(s, {1.0, 2.0, 3.0}, 0.02);
    const auto a = split_for_stream(x, s, NettingConvention::X);
    const auto k = split_for_stream(x, s, NettingConvention::KAPPA);
    EXPECT_LE((a.plus - k.plus).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LE((a.minus - k.minus).cwiseAbs().maxCoeff(), 1e-8);
    const auto reb = split_for_stream(constant_flow(s, 12, 1.0), s, NettingConvention::REB);
    EXPECT_LE(reb.plus.cwiseAbs().maxCoeff() + reb.minus.cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Lva, SplitInvariants) {
    const auto& s = positive_rate_paths();
    const auto x = caplet_stream(s, 2.0, 2.5, 0.05) + fra_stream(s, 1.0, 1.5, 0.05).scaled(-1.0);
    for (auto c : all_conventions()) {
        const auto sp = split_for_stream(x, s, c);
        EXPECT_GE(sp.plus.minCoeff(), 0.0);
        EXPECT_GE(sp.minus.minCoeff(), 0.0);
        if (c != NettingConvention::REB) EXPECT_EQ(sp.plus.cwiseMin(sp.minus).maxCoeff(), 0.0) << to_string(c);
    }
}

TEST(Lva, PlusFormIsPathwiseExact) {
    const auto& s = positive_rate_paths();
    const auto x = swap_stream(s, {1.0, 2.0, 3.0}, 0.05);
    for (auto c : all_conventions()) {
        const auto r = lva(split_for_stream(x, s, c), {10.0 / 365.0}, s);
        EXPECT_LE(r.max_plus_form_error, 1e-15) << to_string(c);
        EXPECT_NEAR(r.lva, r.lva_plus_form, 1e-15) << to_string(c);
    }
}

TEST(Lva, SignAndMonotonicityAllConventions) {
    const auto& s = positive_rate_paths();
    const auto x = caplet_stream(s, 2.0, 2.5, 0.05) + swap_stream(s, {1.0, 2.0, 3.0}, 0.05);
    for (auto c : all_conventions()) {
        const auto rep = verify_sign_monotonicity(split_for_stream(x, s, c), {1 / 365.0, 5 / 365.0, 10 / 365.0, 20 / 365.0}, s);
        EXPECT_TRUE(rep.rates_nonnegative);
        EXPECT_TRUE(rep.sign_ok && rep.monotone_ok && rep.pathwise_ok) << to_string(c) << " " << rep.violations.size();
    }
}

TEST(Lva, NegativeRatesAreInformational) {
    const auto s = simulate(flat_model(-0.01), TimeGrid::uniform(2.0, 4), 3, 1);
    const auto rep = verify_sign_monotonicity(split_for_stream(constant_flow(s, 4, 1.0), s, NettingConvention::X),
                                              {1 / 365.0, 5 / 365.0}, s);
    EXPECT_FALSE(rep.rates_nonnegative);
    EXPECT_FALSE(rep.sign_ok);
    EXPECT_TRUE(rep.passed());
}

TEST(Lva, FirstOrderErrorQuarters) {
    const auto& s = positive_rate_paths();
    const auto split = split_for_stream(caplet_stream(s, 2.0, 2.5, 0.04), s, NettingConvention::X);
    std::vector<double> err;
    for (double days : {8.0, 4.0, 2.0, 1.0}) {
        const auto r = lva(split, {days / 365.0}, s);
        err.push_back(std::abs(r.lva - r.lva_first_order));
    }
    for (std::size_t k = 1; k < err.size(); ++k) EXPECT_NEAR(err[k - 1] / err[k], 4.0, 0.8);
}

TEST(Lva, NettingDemo) {
    const auto s = simulate(flat_model(0.03), TimeGrid::uniform(2.0, 4), 3, 1);
    const GapFundingSpec g{5.0 / 365.0};
    auto d = lva_nonlinearity_demo({constant_flow(s, 2, 1.0), constant_flow(s, 2, -1.0)}, g, s);
    EXPECT_EQ(d.portfolio, 0.0);
    EXPECT_LT(d.sum_of_products, 0.0);
    d = lva_nonlinearity_demo({constant_flow(s, 3, 1.0), constant_flow(s, 3, 1.0)}, g, s);
    EXPECT_NEAR(d.portfolio, 2.0 * d.per_product[0], 1e-18);

    const auto& r = positive_rate_paths();
    d = lva_nonlinearity_demo({fra_stream(r, 2.0, 2.5, 0.045), caplet_stream(r, 2.0, 2.5, 0.045).scaled(-1.0)}, g, r);
    double abs_sum = 0.0;
    for (double v : d.per_product) abs_sum += std::abs(v);
    EXPECT_LE(std::abs(d.portfolio), abs_sum);
}

TEST(Lva, Errors) {
    const auto s = simulate(flat_model(0.03), TimeGrid::uniform(10.0, 4), 2, 1);
    const auto split = split_for_stream(constant_flow(s, 4, 1.0), s, NettingConvention::X);
    try {
        lva(split, {5.0 / 365.0}, s);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::GapBeyondHorizon);
    }
    try {
        split_increments({}, s, NettingConvention::KAPPA);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MissingInput);
    }
}
