#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <gtest/gtest.h>

#include "mesochaos/specfun.hpp"

using namespace mesochaos;
using namespace mesochaos::specfun;

namespace {

double cin_oracle(double x) {
    auto f = [](double t) { return t == 0.0 ? 0.0 : (1.0 - std::cos(t)) / t; };
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, x, 15, 1e-15);
}

}  // namespace

TEST(LogGamma, IntegerFactorials) {
    double fact = 1.0;
    for (int n = 1; n <= 20; ++n) {
        if (n > 1) fact *= n - 1;
        const double eps = std::numeric_limits<double>::epsilon();
        const double lg = log_gamma(n);
        EXPECT_LE(std::abs(lg - std::log(fact)), 2 * eps * std::max(1.0, lg)) << "n = " << n;
        // exp amplifies the rounding of log Gamma by |log Gamma|
        EXPECT_LE(std::abs(std::exp(lg) - fact), (8 + std::abs(lg)) * eps * fact) << "n = " << n;
        EXPECT_DOUBLE_EQ(specfun::gamma(static_cast<double>(n)), fact);
    }
}

TEST(LogGamma, Recurrence) {
    for (double x : {1e-3, 0.1, 0.5, 1.7, 3.25, 10.0, 47.5, 300.0})
        EXPECT_NEAR(log_gamma(x + 1), log_gamma(x) + std::log(x), 1e-12 * std::max(1.0, std::abs(log_gamma(x + 1))));
    EXPECT_THROW(log_gamma(0.0), DomainError);
    EXPECT_THROW(log_gamma(-1.5), DomainError);
}

TEST(Cin, ZeroAndSeries) {
    EXPECT_EQ(cin(0.0), 0.0);
    const double w = 1e-3;
    EXPECT_NEAR(cin(w), w * w / 4 - std::pow(w, 4) / 96, 1e-13);
    EXPECT_NEAR(cin(w), cin_oracle(w), 1e-13);
}

TEST(Cin, IdentityWithCi) {
    EXPECT_NEAR(cin(2.0) - std::log(2.0) - kEulerGamma + ci(2.0), 0.0, 1e-12);
    for (double x : {0.3, 1.0, 3.99, 4.01, 7.5, 20.0, 62.8})
        EXPECT_NEAR(cin(x), std::log(x) + kEulerGamma - ci(x), 1e-12) << x;
}

TEST(Cin, MatchesQuadrature) {
    for (double x : {0.05, 0.7, 2.5, 4.0, 9.0, 31.0})
        EXPECT_NEAR(cin(x), cin_oracle(x), 1e-12) << x;
    EXPECT_NEAR(cin(-2.5), cin(2.5), 1e-15);
    EXPECT_THROW(ci(0.0), DomainError);
}

TEST(BarnesG, SmallIntegers) {
    EXPECT_NEAR(barnes_g(1.0), 1.0, 1e-13);
    EXPECT_NEAR(barnes_g(2.0), 1.0, 1e-13);
    EXPECT_NEAR(barnes_g(3.0), 1.0, 1e-13);
    EXPECT_NEAR(barnes_g(4.0), 2.0, 1e-12);
    EXPECT_NEAR(barnes_g(6.0), 288.0, 1e-9);
}

TEST(BarnesG, RecurrenceAgainstGamma) {
    EXPECT_NEAR(barnes_g(3.5) / barnes_g(2.5), std::tgamma(2.5), 1e-10);
    for (double z : {0.2, 0.9, 1.3, 5.7, 12.25})
        EXPECT_NEAR(log_barnes_g(z + 1) - log_barnes_g(z), std::lgamma(z), 1e-10) << z;
}

TEST(BarnesG, HalfFromGlaisherConstant) {
    const double glaisher = 1.28242712910062263687534256886979;
    const double g_half = std::pow(2.0, 1.0 / 24) * std::exp(0.125) * std::pow(kPi, -0.25) * std::pow(glaisher, -1.5);
    EXPECT_NEAR(barnes_g(0.5), g_half, 1e-12);
}

TEST(FyodorovKeating, TrivialCases) {
    EXPECT_NEAR(fyodorov_keating_constant(0.0, 3).value, 1.0, 1e-12);
    const double g = 0.6;
    EXPECT_NEAR(fyodorov_keating_constant(g, 2).log_value, 2 * fyodorov_keating_constant(g, 1).log_value, 1e-13);
}

TEST(Selberg, TrivialCases) {
    for (int n = 1; n <= 5; ++n) EXPECT_NEAR(selberg_unit(n, 0.0).value, 1.0, 1e-14);
    for (double gt : {0.1, 0.5, 0.9}) EXPECT_NEAR(selberg_unit(1, gt).value, 1.0, 1e-14);
}

TEST(Selberg, TwoPointClosedForm) {
    EXPECT_NEAR(selberg_unit(2, 0.25).value, 8.0 / 3.0, 1e-8);
    for (double gt : {0.05, 0.2, 0.4, 0.45}) {
        const double a = 2 * gt;
        EXPECT_NEAR(selberg_unit(2, gt).value, 2.0 / ((1 - a) * (2 - a)), 1e-10) << gt;
    }
}

TEST(Selberg, ThreePointMatchesQuadrature) {
    const double gt = 0.1;
    boost::math::quadrature::tanh_sinh<double> ts;
    // ordered u < v < w with gaps a = v - u, b = (1 - a) t = w - v; u integrates to 1 - a - b
    auto inner = [&](double a) {
        auto f = [&](double t) {
            const double b = (1 - a) * t;
            return (1 - a) * (1 - a - b) * std::pow(a, -2 * gt) * std::pow(b, -2 * gt) * std::pow(a + b, -2 * gt);
        };
        return ts.integrate(f, 0.0, 1.0, 1e-12);
    };
    const double oracle = 6.0 * ts.integrate(inner, 0.0, 1.0, 1e-12);
    EXPECT_NEAR(selberg_unit(3, gt).value, oracle, 1e-6 * oracle);
}

TEST(Selberg, Divergence) {
    EXPECT_THROW(selberg_unit(2, 0.5), DivergenceError);
    EXPECT_THROW(selberg_unit(4, 0.3), DivergenceError);
    EXPECT_THROW(selberg_unit(0, 0.1), DomainError);
}

TEST(SelbergInterval, TrivialCases) {
    EXPECT_NEAR(selberg_interval_moment(1, 0.8, 2.5).value, 2.5, 1e-13);
    EXPECT_NEAR(selberg_interval_moment(3, 0.0, 1.7).value, std::pow(1.7, 3), 1e-12);
}

TEST(SelbergInterval, TwoPointQuadrature) {
    boost::math::quadrature::tanh_sinh<double> ts;
    const double oracle = 2.0 * ts.integrate([](double d) { return (1 - d) * std::pow(d, -0.49); }, 0.0, 1.0, 1e-14);
    EXPECT_NEAR(selberg_interval_moment(2, 0.7, 1.0).value, oracle, 1e-6);
}

TEST(SelbergInterval, ScalesWithStructureExponent) {
    const double g = 0.6;
    for (int q : {2, 3}) {
        const double ratio = selberg_interval_moment(q, g, 3.0).value / selberg_interval_moment(q, g, 1.0).value;
        EXPECT_NEAR(std::log(ratio), structure_exponent(q, g) * std::log(3.0), 1e-12);
    }
    EXPECT_DOUBLE_EQ(structure_exponent(2, 0.5), 2 - 0.25);
}

TEST(Dyson, TrivialCases) {
    EXPECT_NEAR(dyson_circle(1, 0.7).value, kTwoPi, 1e-12);
    EXPECT_NEAR(dyson_circle(4, 0.0).value, std::pow(kTwoPi, 4), 1e-8);
}

TEST(Dyson, TwoPointQuadrature) {
    boost::math::quadrature::tanh_sinh<double> ts;
    auto f = [](double t) { return std::pow(2 * std::sin(t / 2), -0.5); };
    const double oracle = kTwoPi * ts.integrate(f, 0.0, kTwoPi, 1e-14);
    EXPECT_NEAR(dyson_circle(2, std::sqrt(0.5)).value, oracle, 1e-5 * oracle);
    EXPECT_THROW(dyson_circle(2, 1.0), DivergenceError);
}

TEST(NumericalCrossCheck, TwoPointInstances) {
    for (double g2 : {0.1, 0.5, 0.9}) {
        const double g = std::sqrt(g2);
        auto s = selberg_interval_quadrature(2, g, 1.3);
        EXPECT_NEAR(s.value / selberg_interval_moment(2, g, 1.3).value, 1.0, 1e-6) << g2;
        auto d = dyson_circle_quadrature(2, g);
        EXPECT_NEAR(d.value / dyson_circle(2, g).value, 1.0, 1e-6) << g2;
    }
}

TEST(NumericalCrossCheck, ThreePointWithinReportedError) {
    for (double g2 : {0.1, 0.3}) {
        const double g = std::sqrt(g2);
        auto s = selberg_interval_quadrature(3, g, 1.0);
        EXPECT_LE(std::abs(s.value - selberg_interval_moment(3, g, 1.0).value), 4 * s.error) << g2;
        auto d = dyson_circle_quadrature(3, g);
        EXPECT_LE(std::abs(d.value - dyson_circle(3, g).value), 4 * d.error) << g2;
    }
}
