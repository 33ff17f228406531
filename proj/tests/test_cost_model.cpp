#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "propcomp/cost_model.hpp"
#include "propcomp/errors.hpp"

using namespace propcomp;

namespace {

ProductionTechnology cobb_douglas(double scale, std::vector<double> beta, std::vector<double> prices) {
    return {CobbDouglas{scale, std::move(beta)}, std::move(prices)};
}

ProductionTechnology ces(double scale, std::vector<double> a, double gamma, double rho,
                         std::vector<double> prices) {
    return {GeneralizedCes{scale, std::move(a), gamma, rho}, std::move(prices)};
}

double oracle_cost(const ProductionTechnology& tech, double x) {
    if (const auto* cd = std::get_if<CobbDouglas>(&tech.form)) {
        return oracle::min_input_cost(
            [&](std::span<const double> r) { return oracle::cobb_douglas_output(cd->scale, cd->elasticities, r); },
            tech.input_prices, x);
    }
    const auto& g = std::get<GeneralizedCes>(tech.form);
    return oracle::min_input_cost(
        [&](std::span<const double> r) {
            return oracle::ces_output(g.scale, g.weights, g.returns, g.substitution, r);
        },
        tech.input_prices, x);
}

}  // namespace

TEST(CostEvaluation, PowerAndLinearValues) {
    EXPECT_EQ(CostFunction::power(1, 2).value(0), 0.0);
    EXPECT_DOUBLE_EQ(CostFunction::power(2, 3).value(2), 16.0);
    EXPECT_DOUBLE_EQ(CostFunction::linear(3).value(1.5), 4.5);
}

TEST(CostEvaluation, Marginals) {
    EXPECT_DOUBLE_EQ(CostFunction::power(1, 2).marginal(3), 6.0);
    EXPECT_EQ(CostFunction::power(1, 2).marginal(0), 0.0);
    EXPECT_DOUBLE_EQ(CostFunction::linear(5).marginal(0), 5.0);
    EXPECT_DOUBLE_EQ(CostFunction::power(4, 1).marginal(0), 4.0);
}

TEST(CostEvaluation, NegativeOutputRejected) {
    EXPECT_THROW(CostFunction::power(1, 2).value(-1e-3), DomainError);
    EXPECT_THROW(CostFunction::linear(1).marginal(-1), DomainError);
}

TEST(CostEvaluation, UnitExponentPowerIsLinear) {
    const auto p = CostFunction::power(2.5, 1.0);
    const auto l = CostFunction::linear(2.5);
    EXPECT_TRUE(p.is_linear());
    for (double x : {0.0, 0.3, 1.0, 7.0}) {
        EXPECT_EQ(p.value(x), l.value(x));
        EXPECT_EQ(p.marginal(x), l.marginal(x));
    }
}

TEST(CostEvaluation, InvalidParametersRejected) {
    EXPECT_THROW(CostFunction::power(0, 2), DomainError);
    EXPECT_THROW(CostFunction::power(1, 0.5), DomainError);
    EXPECT_THROW(CostFunction::linear(-1), DomainError);
    EXPECT_THROW(CostProfile({CostFunction::linear(1)}, 0.0), DomainError);
    EXPECT_THROW(CostProfile({}, 1.0), PreconditionError);
}

TEST(CostEvaluation, SmoothConvexityIsSpotChecked) {
    EXPECT_NO_THROW(CostFunction::smooth([](double x) { return std::exp(x) - 1; },
                                         [](double x) { return std::exp(x); }));
    EXPECT_THROW(CostFunction::smooth([](double x) { return std::sqrt(x); },
                                      [](double x) { return 0.5 / std::sqrt(x); }),
                 DomainError);
}

TEST(CostEvaluation, FiniteDifferenceConsistency) {
    const std::vector<CostFunction> costs{
        CostFunction::power(1, 2), CostFunction::power(0.7, 3.3), CostFunction::power(3, 1.1),
        CostFunction::linear(2),
        CostFunction::smooth([](double x) { return x * x + std::log1p(x); },
                             [](double x) { return 2 * x + 1 / (1 + x); })};
    const double h = 1e-6;
    for (const auto& f : costs) {
        for (double x = 0.05; x <= 10.0; x += 0.35) {
            const double fd = (f.value(x + h) - f.value(x)) / h;
            EXPECT_LE(std::abs(fd - f.marginal(x)), 1e-4 * (1 + f.marginal(x))) << "x=" << x;
        }
    }
}

TEST(CostEvaluation, InverseMarginal) {
    const auto f = CostFunction::power(1, 2);
    EXPECT_DOUBLE_EQ(f.inverse_marginal(1.0), 0.5);
    EXPECT_EQ(f.inverse_marginal(0.0), 0.0);
    const auto g = CostFunction::smooth([](double x) { return std::exp(x) - 1; },
                                        [](double x) { return std::exp(x); });
    EXPECT_NEAR(g.inverse_marginal(std::exp(1.5)), 1.5, 1e-12);
    EXPECT_EQ(g.inverse_marginal(0.5), 0.0);
    EXPECT_THROW(CostFunction::linear(1).inverse_marginal(2.0), UnsupportedError);
}

TEST(CobbDouglas, SingleInputUnitElasticity) {
    const auto f = cost_from_cobb_douglas(cobb_douglas(1, {1}, {1}));
    const auto p = f.as_power();
    ASSERT_TRUE(p);
    EXPECT_DOUBLE_EQ(p->coefficient, 1.0);
    EXPECT_DOUBLE_EQ(p->exponent, 1.0);
}

TEST(CobbDouglas, SingleInputHalfElasticity) {
    // x = sqrt(r) needs r = x^2, so phi(x) = x^2.
    const auto tech = cobb_douglas(1, {0.5}, {1});
    const auto p = cost_from_cobb_douglas(tech).as_power();
    ASSERT_TRUE(p);
    EXPECT_DOUBLE_EQ(p->exponent, 2.0);
    EXPECT_NEAR(p->coefficient, 1.0, 1e-14);
    EXPECT_NEAR(oracle_cost(tech, 1.5), 2.25, 1e-9);
}

TEST(CobbDouglas, TwoInputs) {
    const auto tech = cobb_douglas(2, {0.25, 0.25}, {1, 1});
    const auto p = cost_from_cobb_douglas(tech).as_power();
    ASSERT_TRUE(p);
    EXPECT_DOUBLE_EQ(p->exponent, 2.0);
    EXPECT_NEAR(p->coefficient, 0.5, 1e-14);
}

TEST(CobbDouglas, IncreasingReturnsRejected) {
    EXPECT_FALSE(cobb_douglas(1, {0.7, 0.6}, {1, 1}).decreasing_returns());
    EXPECT_THROW(cost_from_cobb_douglas(cobb_douglas(1, {0.7, 0.6}, {1, 1})), ReturnsToScaleError);
    EXPECT_THROW(cost_from_cobb_douglas(cobb_douglas(1, {0.5}, {-1})), DomainError);
}

TEST(Ces, SingleInputExamples) {
    auto p = cost_from_ces(ces(1, {1}, 1, 0.5, {1})).as_power();
    ASSERT_TRUE(p);
    EXPECT_NEAR(p->coefficient, 1.0, 1e-14);
    EXPECT_DOUBLE_EQ(p->exponent, 1.0);

    p = cost_from_ces(ces(1, {1}, 0.5, 0.5, {1})).as_power();
    ASSERT_TRUE(p);
    EXPECT_NEAR(p->coefficient, 1.0, 1e-14);
    EXPECT_DOUBLE_EQ(p->exponent, 2.0);
}

TEST(Ces, DomainChecks) {
    EXPECT_THROW(cost_from_ces(ces(1, {1, 1}, 1.2, 0.5, {1, 1})), ReturnsToScaleError);
    EXPECT_THROW(cost_from_ces(ces(1, {1, 1}, 0.8, 1.0, {1, 1})), DomainError);
    EXPECT_THROW(cost_from_ces(ces(1, {1, 1}, 0.8, 0.0, {1, 1})), DomainError);
    EXPECT_THROW(cost_from_ces(ces(1, {1}, 0.8, 0.5, {1, 1})), PreconditionError);
}

TEST(Derivation, PriceHomogeneityOfDegreeOne) {
    const auto cd = cobb_douglas(1.7, {0.2, 0.35, 0.1}, {0.8, 2.0, 1.3});
    const auto ce = ces(0.9, {1.0, 0.4, 2.2}, 0.6, 0.3, {0.8, 2.0, 1.3});
    for (const auto& tech : {cd, ce}) {
        auto scaled = tech;
        for (auto& p : scaled.input_prices) p *= 2.0;
        const double c = derive_cost(tech).as_power()->coefficient;
        const double c2 = derive_cost(scaled).as_power()->coefficient;
        EXPECT_NEAR(c2 / c, 2.0, 1e-12);
    }
}

TEST(Derivation, AgreesWithGridMinimization) {
    const std::vector<ProductionTechnology> techs{
        cobb_douglas(2, {0.25, 0.25}, {1, 1}), cobb_douglas(1.3, {0.4, 0.3}, {2.0, 0.7}),
        cobb_douglas(0.8, {0.2, 0.1, 0.3}, {1.1, 0.5, 3.0}), ces(1.2, {1.0, 2.0}, 0.7, 0.4, {1.5, 0.6}),
        ces(0.6, {0.5, 1.5, 1.0}, 0.5, 0.8, {1.0, 2.0, 0.4})};
    for (const auto& tech : techs) {
        const auto f = derive_cost(tech);
        for (double x : {0.5, 1.0, 2.0}) {
            const double want = oracle_cost(tech, x);
            EXPECT_NEAR(f.value(x) / want, 1.0, 5e-3) << "x=" << x;
        }
    }
}

TEST(Profile, Accessors) {
    const std::vector<double> c{3, 1, 2};
    const auto profile = CostProfile::linear(c, 2.0);
    EXPECT_TRUE(profile.all_linear());
    EXPECT_EQ(profile.linear_marginals(), c);
    EXPECT_EQ(profile.common_exponent(), 1.0);
    const auto powers = CostProfile::identical_power(4, 1.0, 2.5, 1.0);
    EXPECT_FALSE(powers.any_linear());
    EXPECT_EQ(powers.common_exponent(), 2.5);
    const CostProfile mixed({CostFunction::power(1, 2), CostFunction::power(1, 3)}, 1.0);
    EXPECT_FALSE(mixed.common_exponent());
}
