#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "mesochaos/gaussian_field.hpp"
#include "mesochaos/sine.hpp"

using namespace mesochaos;
using namespace mesochaos::sine;

namespace {

struct MeanSe {
    double mean, se;
};

MeanSe stats(const std::vector<double>& x) {
    double s = 0, s2 = 0;
    for (double v : x) s += v, s2 += v * v;
    const double n = static_cast<double>(x.size()), m = s / n;
    return {m, std::sqrt((s2 / n - m * m) / n)};
}

TestFunction bump(double c, double s, double center = 0.0) {
    return {[=](double x) { return c * std::exp(-(x - center) * (x - center) / (2 * s * s)); }, center - 10 * s,
            center + 10 * s};
}

LinearStatistic two_point(double eps = 0.05, double gamma = 0.5) {
    LinearStatistic s;
    s.centers = {0.0, 0.5};
    s.weights = {1.0, -0.5};
    s.scales = {eps, eps};
    s.gamma = gamma;
    return s;
}

}  // namespace

TEST(Kernel, DiagonalAndSymmetry) {
    EXPECT_EQ(sine_kernel(7, 0.3, 0.3), 7.0);
    EXPECT_NEAR(sine_kernel(7, 0.3, 0.3 + 1e-9), 7.0, 1e-6);
    EXPECT_DOUBLE_EQ(sine_kernel(5, 0.1, 0.9), sine_kernel(5, 0.9, 0.1));
    EXPECT_NEAR(sine_kernel(4, 0.0, 0.25), 0.0, 1e-15);
}

TEST(Kernel, RestrictedSpectrumInUnitInterval) {
    WindowSampler w(16, 0.0, 1.0);
    EXPECT_LT(w.spectrum_breach(), 1e-10);
    EXPECT_NEAR(w.expected_count(), 16.0, 1e-8);
}

TEST(Fredholm, TrivialCases) {
    EXPECT_NEAR(fredholm_det(8, [](double) { return 1.0; }, 0.0, 1.0, 0.0).value, 0.0, 1e-14);
    EXPECT_NEAR(fredholm_det(8, [](double) { return 0.0; }, 0.0, 1.0).value, 0.0, 1e-14);
}

TEST(Fredholm, SmallGapExpansion) {
    // P(no point in [0, s]) = 1 - N s + O((N s)^4) for the sine process
    const int N = 4;
    const double s = 1e-3;
    const double p = std::exp(gap_probability(N, 0.0, s).value);
    EXPECT_NEAR((1 - p) / (N * s), 1.0, 1e-4);
}

TEST(Fredholm, DistantWindowsDecouple) {
    const int N = 32;
    auto h1 = bump(0.3, 0.05, 0.0), h2 = bump(0.3, 0.05, 5.0);
    TestFunction both{[&](double x) { return h1(x) + h2(x); }, h1.a, h2.b};
    const double joint = laplace_transform(both, N).value;
    const double sep = laplace_transform(h1, N).value + laplace_transform(h2, N).value;
    EXPECT_NEAR(joint, sep, 1e-3 * std::abs(sep));
}

TEST(Laplace, AgreesWithWindowSampler) {
    const int N = 8, n = 4000;
    auto h = bump(0.5, 0.1, 0.0);
    const auto ref = laplace_transform(h, N);
    WindowSampler w(N, h.a, h.b);
    std::vector<double> e;
    for (int t = 0; t < n; ++t) {
        double s = 0;
        for (double x : w.sample(12, t)) s += h(x);
        e.push_back(std::exp(s));
    }
    auto m = stats(e);
    EXPECT_LE(std::abs(m.mean - std::exp(ref.value)), 4 * m.se);
}

TEST(Laplace, PredictionLinearInN) {
    auto h = bump(1.0, 0.1);
    const double a = asymp_prediction(h, 4), b = asymp_prediction(h, 8), c = asymp_prediction(h, 12);
    EXPECT_NEAR(c - b, b - a, 1e-10);
    // N int h = N c s sqrt(2 pi)
    EXPECT_NEAR(b - a, 4 * 0.1 * std::sqrt(kTwoPi), 1e-10);
    // 1/2 ||h||^2 = c^2 / (4 pi) for a Gaussian bump
    EXPECT_NEAR(a - 4 * 0.1 * std::sqrt(kTwoPi), 1.0 / (4 * kPi), 1e-6);
}

TEST(Laplace, MultiPointSinglePoint) {
    LinearStatistic s;
    s.centers = {0.2};
    s.weights = {1.0};
    s.scales = {0.05};
    s.gamma = 0.5;
    EXPECT_NEAR(multi_point_laplace(s, 16).value, laplace_transform(s.test_function(), 16).value, 1e-14);
}

TEST(Laplace, VarianceMatchesSecondDerivative) {
    const int N = 16;
    auto s = two_point();
    const auto tf = s.test_function();
    auto ld = [&](double t) {
        TestFunction g{[&, t](double x) { return t * tf(x); }, tf.a, tf.b};
        return laplace_transform(g, N).value;
    };
    const double h = 0.05;
    const double d2 = (-ld(2 * h) + 16 * ld(h) - 30 * ld(0) + 16 * ld(-h) - ld(-2 * h)) / (12 * h * h);
    EXPECT_NEAR(s.variance(N), d2, 1e-4 * d2);
    EXPECT_LT(s.variance(N), s.limiting_variance());
}

TEST(Sampler, MeanCountAndRigidity) {
    const int N = 16, n = 2000;
    WindowSampler w(N, 0.0, 1.0);
    std::vector<double> c;
    for (int t = 0; t < n; ++t) {
        auto pts = w.sample(3, t);
        for (double x : pts) {
            ASSERT_GE(x, 0.0);
            ASSERT_LE(x, 1.0);
        }
        c.push_back(static_cast<double>(pts.size()));
    }
    auto m = stats(c);
    EXPECT_LE(std::abs(m.mean - N), 4 * m.se + 1e-12);
    const double var = m.se * m.se * n;
    EXPECT_LT(var, m.mean);
}

TEST(Sampler, GapAgainstDeterminant) {
    const int N = 8, n = 4000;
    const double len = 0.1;
    WindowSampler w(N, 0.0, 1.0);
    std::vector<double> empty;
    for (int t = 0; t < n; ++t) {
        auto pts = w.sample(17, t);
        empty.push_back(std::none_of(pts.begin(), pts.end(), [&](double x) { return x < len; }) ? 1.0 : 0.0);
    }
    auto m = stats(empty);
    const double p = std::exp(gap_probability(N, 0.0, len).value);
    EXPECT_LE(std::abs(m.mean - p), 4 * std::sqrt(p * (1 - p) / n));
}

TEST(Sampler, Reproducible) {
    EXPECT_EQ(sample_sine_window(8, 0.0, 1.0, 4, 2), sample_sine_window(8, 0.0, 1.0, 4, 2));
}

TEST(Chaos, FlatLimit) {
    SineChaosSetting cs;
    cs.N = 32;
    cs.gamma = 1e-9;
    auto d = sine_chaos_measure({sample_sine_window(32, -1.0, 2.0, 1)}, cs, {0.0, 0.5});
    for (double v : d[0]) EXPECT_NEAR(v, 1.0, 1e-7);
}

TEST(Chaos, SecondMomentThroughDeterminants) {
    SineChaosSetting cs;
    cs.N = 64;
    cs.eps = 0.05;
    cs.gamma = 0.5;
    auto m = sine_second_moment(cs, 1.0);
    const auto g = field::exact_gaussian_moment(2, 0.5, field::Weight{0.0, 1.0, {}}, 0.05);
    EXPECT_NEAR(m.value / g.value, 1.0, 0.03);
}
