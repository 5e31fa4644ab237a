#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "liquiforge/core/numerics.hpp"
#include "liquiforge/core/philox.hpp"
#include "liquiforge/market/curve.hpp"
#include "liquiforge/market/scenario_set.hpp"
#include "liquiforge/market/simulate.hpp"

using namespace liquiforge;

namespace {

DiscountCurve test_curve() {
    return DiscountCurve(CurveKind::FUNDING,
                         {{0.0, 1.0}, {1.0, 0.97}, {2.0, 0.942}, {3.0, 0.913}, {5.0, 0.86}, {7.0, 0.805}},
                         {{0.0, 0.004}, {2.0, 0.006}});
}

ModelSpec gaussian_spec(double a = 0.1, double sigma = 0.01) {
    ModelSpec m;
    m.kind = ModelKind::GAUSSIAN_SHORT_RATE;
    m.gaussian = {a, sigma, test_curve()};
    return m;
}

ModelSpec black_spec(double sigma = 0.2) {
    ModelSpec m;
    m.kind = ModelKind::BLACK_SINGLE_PERIOD;
    m.black = {0.03, sigma, 5.0, 5.5, std::nullopt};
    m.numeraire = NumeraireChoice::terminal_bond(5.5);
    return m;
}

} // namespace

TEST(Philox, KnownAnswerVectors) {
    auto zero = Philox4x32::generate({0, 0, 0, 0}, {0, 0});
    EXPECT_EQ(zero[0], 0x6627e8d5u);
    EXPECT_EQ(zero[1], 0xe169c58du);
    EXPECT_EQ(zero[2], 0xbc57ac4cu);
    EXPECT_EQ(zero[3], 0x9b00dbd8u);
    auto ones = Philox4x32::generate({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
    EXPECT_EQ(ones[0], 0x408f276du);
    EXPECT_EQ(ones[1], 0x41c83b0eu);
    EXPECT_EQ(ones[2], 0xa20bc7c6u);
    EXPECT_EQ(ones[3], 0x6d5451fdu);
}

TEST(Philox, NormalsHaveUnitMoments) {
    CounterRng rng(7);
    std::vector<double> z, z2;
    for (std::uint64_t p = 0; p < 200000; ++p)
        for (double v : rng.normals(p, 3)) {
            z.push_back(v);
            z2.push_back(v * v);
        }
    auto m = estimate(z);
    auto v = estimate(z2);
    EXPECT_TRUE(within_std_errors(m.mean, 0.0, m.std_error));
    EXPECT_TRUE(within_std_errors(v.mean, 1.0, v.std_error));
}

TEST(Numerics, NormalCdfMatchesReferenceValues) {
    EXPECT_NEAR(normal_cdf(0.0), 0.5, 1e-16);
    EXPECT_NEAR(normal_cdf(-0.22360679774997896), 0.411531636879, 1e-12);
    EXPECT_NEAR(normal_cdf(1.959963984540054), 0.975, 1e-14);
    EXPECT_NEAR(normal_cdf(-8.0), 6.22096057427178e-16, 1e-27);
}

TEST(TimeGrid, RejectsBadGrids) {
    EXPECT_THROW(TimeGrid({0.5, 1.0}), Error);
    EXPECT_THROW(TimeGrid({0.0, 1.0, 1.0}), Error);
    TimeGrid g({0.0, 0.5, 2.0});
    EXPECT_DOUBLE_EQ(g.mesh(), 1.5);
    EXPECT_EQ(g.index_of(0.5), 1u);
    try {
        g.index_of(0.7);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotOnGrid);
    }
    auto r = g.refined();
    EXPECT_EQ(r.size(), 5u);
    EXPECT_TRUE(g.is_subgrid_of(r));
}

TEST(ForwardRate, DefinitionExamples) {
    DiscountCurve c(CurveKind::OIS, {{0.0, 1.0}, {1.0, 0.98}, {1.5, 0.96}});
    EXPECT_NEAR(forward_rate(c, 1.0, 1.5), 0.0416666666667, 1e-9);
    DiscountCurve flat(CurveKind::OIS, {{0.0, 1.0}, {1.0, 0.9}, {2.0, 0.9}});
    EXPECT_DOUBLE_EQ(forward_rate(flat, 1.0, 2.0), 0.0);
    DiscountCurve q(CurveKind::OIS, {{0.0, 1.0}, {1.0, 0.8}});
    EXPECT_NEAR(forward_rate(q, 0.0, 1.0), 0.25, 1e-15);
}

TEST(ForwardRate, Errors) {
    DiscountCurve c(CurveKind::OIS, {{0.0, 1.0}, {1.0, 0.98}, {1.5, 0.96}});
    try {
        forward_rate(c, 1.0, 1.25);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotOnGrid);
    }
    try {
        forward_rate(c, 1.5, 1.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Degenerate);
    }
}

TEST(FundingBond, ClosedFormExamples) {
    TimeGrid g({0.0, 1.0, 3.0});
    auto c = DiscountCurve::flat(CurveKind::FUNDING, 0.02, 5.0, 0.01);
    EXPECT_NEAR(funding_bond(c, g, 3.0, 1.0, 0.95), 0.931188739641, 1e-6);
    EXPECT_NEAR(funding_bond(c, g, 3.0, 1.0, 0.95), 0.95 * std::exp(-0.02), 1e-14);
    EXPECT_DOUBLE_EQ(funding_bond(c, g, 3.0, 3.0, 0.7), 1.0);
    auto nospread = DiscountCurve::flat(CurveKind::FUNDING, 0.02, 5.0);
    EXPECT_DOUBLE_EQ(funding_bond(nospread, g, 3.0, 1.0, 0.95), 0.95);
    try {
        funding_bond(c, g, 1.0, 3.0, 1.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NegativeTimeOrder);
    }
    EXPECT_THROW(funding_bond(c, g, 2.0, 1.0, 0.95), Error);
}

TEST(Curve, FundingDiscountIsOisTimesSpread) {
    auto c = test_curve();
    EXPECT_NEAR(c.spread_integral(0.0, 3.0), 0.004 * 2.0 + 0.006 * 1.0, 1e-15);
    EXPECT_NEAR(c.discount(3.0), 0.913 * std::exp(-0.014), 1e-15);
    EXPECT_NEAR(c.with_kind(CurveKind::OIS).discount(3.0), 0.913, 1e-15);
    EXPECT_NEAR(c.ois_discount(4.0), std::sqrt(0.913 * 0.86), 1e-14);
    EXPECT_THROW(c.ois_discount(8.0), Error);
}

TEST(GaussianModel, BondReconstitutionMatchesCurveNodes) {
    const auto curve = test_curve();
    GaussianShortRate m(0.1, 0.012, curve);
    for (const auto& [T, df] : curve.nodes()) EXPECT_NEAR(m.ois_bond(0.0, T, 0.0) / df, 1.0, 1e-10);
}

TEST(GaussianModel, SmallMeanReversionMatchesHoLeeLimit) {
    GaussianShortRate ho(0.0, 0.01, test_curve());
    GaussianShortRate near(1e-9, 0.01, test_curve());
    EXPECT_NEAR(ho.integrated_variance(2.0), 0.01 * 0.01 * 8.0 / 3.0, 1e-18);
    EXPECT_NEAR(near.integrated_variance(2.0) / ho.integrated_variance(2.0), 1.0, 1e-8);
    GaussianShortRate a(0.3, 0.01, test_curve());
    // closed form evaluated at u = a*tau above the series threshold
    const double tau = 4.0, u = 1.2;
    const double closed = 1e-4 / (0.3 * 0.3) * (tau - 2.0 * (1 - std::exp(-u)) / 0.3 + (1 - std::exp(-2 * u)) / 0.6);
    EXPECT_NEAR(a.integrated_variance(tau) / closed, 1.0, 1e-12);
    GaussianShortRate b(0.01, 0.01, test_curve());
    const double u2 = 0.01 * 3.0;
    const double closed2 = 1e-4 / 1e-4 * (3.0 - 2.0 * (1 - std::exp(-u2)) / 0.01 + (1 - std::exp(-2 * u2)) / 0.02);
    EXPECT_NEAR(b.integrated_variance(3.0) / closed2, 1.0, 1e-7);
}

TEST(Simulate, DeterministicAcrossThreadCounts) {
    auto spec = gaussian_spec();
    auto g = TimeGrid::uniform(5.0, 10);
    auto s1 = simulate(spec, g, 5000, 42, 1);
    auto s4 = simulate(spec, g, 5000, 42, 4);
    EXPECT_TRUE(s1.state_matrix() == s4.state_matrix());
    EXPECT_TRUE(s1.numeraire_matrix() == s4.numeraire_matrix());
    auto other = simulate(spec, g, 5000, 43, 1);
    EXPECT_FALSE(s1.state_matrix() == other.state_matrix());
}

TEST(Simulate, RejectsInvalidSpecs) {
    auto spec = gaussian_spec(0.1, -0.01);
    EXPECT_THROW(simulate(spec, TimeGrid::uniform(1.0, 2), 10, 1), Error);
    EXPECT_THROW(simulate(gaussian_spec(), TimeGrid::uniform(1.0, 2), 0, 1), Error);
}

TEST(Simulate, ZeroVolatilityGivesCurveForwardBonds) {
    auto spec = gaussian_spec(0.1, 0.0);
    auto g = TimeGrid::uniform(5.0, 5);
    auto s = simulate(spec, g, 50, 3);
    const auto c = test_curve();
    for (std::size_t p = 0; p < s.paths(); ++p)
        for (std::size_t i = 0; i < g.size(); ++i) {
            EXPECT_NEAR(s.funding_bond(p, i, 5.0), c.discount(5.0) / c.discount(g[i]), 1e-14);
            EXPECT_NEAR(s.numeraire(p, i), 1.0 / c.discount(g[i]), 1e-13);
        }
    ModelSpec det = gaussian_spec();
    det.kind = ModelKind::DETERMINISTIC;
    auto d = simulate(det, g, 20, 3);
    EXPECT_DOUBLE_EQ(d.state(7, 3), 0.0);
}

TEST(Simulate, PositivityAndMaturityIdentity) {
    auto s = simulate(gaussian_spec(0.05, 0.02), TimeGrid::uniform(5.0, 10), 2000, 11);
    for (std::size_t p = 0; p < s.paths(); ++p)
        for (std::size_t i = 0; i < s.times(); ++i) {
            EXPECT_GT(s.numeraire(p, i), 0.0);
            EXPECT_EQ(s.funding_bond(p, i, s.grid()[i]), 1.0);
            EXPECT_EQ(s.ois_bond(p, i, s.grid()[i]), 1.0);
            EXPECT_GT(s.funding_bond(p, i, 5.0), 0.0);
        }
}

class MartingaleTest : public ::testing::TestWithParam<std::tuple<double, bool>> {};

TEST_P(MartingaleTest, DeflatedBondsAreMartingales) {
    const auto [a, terminal] = GetParam();
    auto spec = gaussian_spec(a, 0.015);
    if (terminal) spec.numeraire = NumeraireChoice::terminal_bond(5.0);
    auto g = TimeGrid::uniform(5.0, 5);
    auto s = simulate(spec, g, 100000, 2024);
    const double n0 = s.numeraire(0, 0);
    for (std::size_t k = 1; k < g.size(); ++k) {
        const double T = g[k];
        for (std::size_t i = 0; i <= k; ++i) {
            std::vector<double> v(s.paths());
            for (std::size_t p = 0; p < s.paths(); ++p) v[p] = s.funding_bond(p, i, T) / s.numeraire(p, i) * n0;
            auto e = estimate(v);
            EXPECT_TRUE(within_std_errors(e.mean, s.initial_bond(T), std::max(e.std_error, 1e-14)))
                << "a=" << a << " T=" << T << " t=" << g[i] << " mean=" << e.mean << " se=" << e.std_error;
        }
    }
}

INSTANTIATE_TEST_SUITE_P(Measures, MartingaleTest,
                         ::testing::Values(std::make_tuple(0.1, false), std::make_tuple(0.0, false),
                                           std::make_tuple(0.1, true), std::make_tuple(0.0, true)));

TEST(BlackModel, ZeroVolatilityFreezesRate) {
    auto s = simulate(black_spec(0.0), TimeGrid({0.0, 5.0, 5.5}), 100, 5);
    for (std::size_t p = 0; p < s.paths(); ++p) EXPECT_EQ(s.state(p, 1), 0.03);
}

TEST(BlackModel, ForwardRateIsMartingaleUnderT2Measure) {
    auto s = simulate(black_spec(), TimeGrid({0.0, 5.0, 5.5}), 1000000, 99);
    std::vector<double> L(s.paths());
    for (std::size_t p = 0; p < s.paths(); ++p) L[p] = s.state(p, 1);
    auto e = estimate(L);
    EXPECT_TRUE(within_std_errors(e.mean, 0.03, e.std_error)) << e.mean << " +- " << e.std_error;
}

TEST(BlackModel, RejectsWrongGrid) {
    try {
        simulate(black_spec(), TimeGrid({0.0, 4.0, 5.5}), 10, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::GridMismatch);
    }
}

TEST(NumeraireChange, IdentityAndBondRatioWeight) {
    auto s = simulate(black_spec(), TimeGrid({0.0, 5.0, 5.5}), 200000, 17);
    auto same = numeraire_change_weight(s, s.measure(), s.measure(), 5.0);
    for (double w : same) EXPECT_EQ(w, 1.0);
    auto to_t1 = MeasureSpec::terminal_bond(5.0);
    auto w = numeraire_change_weight(s, s.measure(), to_t1, 5.0);
    const double p1 = std::exp(-0.03 * 5.0);
    const double p2 = p1 / (1.0 + 0.03 * 0.5);
    for (std::size_t p = 0; p < 100; ++p) {
        const double L = s.state(p, 1);
        EXPECT_NEAR(w[p], (1.0 + L * 0.5) * (p2 / p1), 1e-14);
    }
    auto e = estimate(w);
    EXPECT_TRUE(within_std_errors(e.mean, 1.0, e.std_error));
}

TEST(NumeraireChange, ZeroVolatilityWeightIsExactlyOne) {
    auto s = simulate(black_spec(0.0), TimeGrid({0.0, 5.0, 5.5}), 10, 17);
    for (double w : numeraire_change_weight(s, s.measure(), MeasureSpec::terminal_bond(5.0), 5.0)) EXPECT_EQ(w, 1.0);
}

TEST(NumeraireChange, GaussianWeightsAverageToOne) {
    auto g = TimeGrid::uniform(5.0, 5);
    auto s = simulate(gaussian_spec(0.1, 0.015), g, 100000, 8);
    for (std::size_t i = 1; i < g.size(); ++i) {
        auto w = numeraire_change_weight(s, s.measure(), MeasureSpec::terminal_bond(5.0), g[i]);
        auto e = estimate(w);
        EXPECT_TRUE(within_std_errors(e.mean, 1.0, e.std_error)) << g[i];
    }
}

TEST(NumeraireChange, MissingNumeraire) {
    auto spec = gaussian_spec();
    spec.numeraire = NumeraireChoice::terminal_bond(3.0);
    auto s = simulate(spec, TimeGrid::uniform(3.0, 3), 10, 1);
    try {
        numeraire_change_weight(s, s.measure(), MeasureSpec::funding_account(), 1.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MissingNumeraire);
    }
}

TEST(ScenarioSet, RestrictionKeepsPathValues) {
    auto g = TimeGrid::uniform(4.0, 8);
    auto s = simulate(gaussian_spec(), g, 100, 1);
    auto coarse = TimeGrid::uniform(4.0, 2);
    auto r = s.restrict_to(coarse);
    for (std::size_t p = 0; p < 100; ++p) {
        EXPECT_EQ(r.state(p, 1), s.state(p, 4));
        EXPECT_EQ(r.numeraire(p, 2), s.numeraire(p, 8));
    }
    EXPECT_THROW(s.restrict_to(TimeGrid({0.0, 0.3, 4.0})), Error);
}
