#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/trapezoidal.hpp>
#include <gtest/gtest.h>

#include "mesochaos/covariance.hpp"
#include "mesochaos/cue.hpp"
#include "mesochaos/gaussian_field.hpp"

using namespace mesochaos;
using namespace mesochaos::cue;

namespace {

MesoscopicStatistic two_point(int N, double gamma = 1.0, double eps = 0.1) {
    MesoscopicStatistic s;
    s.N = N;
    s.alpha = 0.5;
    s.centers = {0.0, 0.5};
    s.weights = {1.0, 1.0};
    s.scales = {eps, eps};
    s.gamma = gamma;
    return s;
}

std::vector<std::pair<const char*, ToeplitzSymbol>> symbols(int N) {
    std::vector<cplx> geo{0.8};
    for (int k = 1; k <= 60; ++k) geo.push_back(0.8 * std::pow(0.6, k));
    return {{"trig", ToeplitzSymbol::real_symbol({0.3, 0.5, 0.2})},
            {"complex", ToeplitzSymbol::real_symbol({0.0, cplx(0.4, 0.3), 0.1, cplx(0.0, -0.05)})},
            {"geometric", ToeplitzSymbol::real_symbol(geo)},
            {"meso-weak", symbol_coeffs(two_point(N, 0.5))},
            {"meso-strong", symbol_coeffs(two_point(N, 1.0))}};
}

struct MeanSe {
    double mean, se;
};

MeanSe stats(const std::vector<double>& x) {
    double s = 0, s2 = 0;
    for (double v : x) s += v, s2 += v * v;
    const double n = static_cast<double>(x.size()), m = s / n;
    return {m, std::sqrt((s2 / n - m * m) / n)};
}

}  // namespace

TEST(Sampler, AnglesInRangeAndReproducible) {
    auto a = sample_cue(12, 4, 9), b = sample_cue(12, 4, 9);
    ASSERT_EQ(a.angles.size(), 12u);
    EXPECT_EQ(a.angles, b.angles);
    for (double t : a.angles) {
        EXPECT_GE(t, 0.0);
        EXPECT_LT(t, kTwoPi);
    }
    EXPECT_THROW(sample_cue(0, 1), DomainError);
}

TEST(Sampler, ArcCountMean) {
    const int N = 32, n = 10000;
    const double s = kPi / 4;
    std::vector<double> counts, shifted;
    for (int t = 0; t < n; ++t) {
        auto smp = sample_cue(N, 77, t);
        counts.push_back(static_cast<double>(std::count_if(smp.angles.begin(), smp.angles.end(), [&](double a) { return a < s; })));
        shifted.push_back(static_cast<double>(std::count_if(smp.angles.begin(), smp.angles.end(), [&](double a) { return a >= 2.0 && a < 2.0 + s; })));
    }
    auto c = stats(counts), d = stats(shifted);
    EXPECT_LE(std::abs(c.mean - N * s / kTwoPi), 4 * c.se);
    EXPECT_LE(std::abs(d.mean - N * s / kTwoPi), 4 * d.se);
}

TEST(Sampler, TraceSecondMomentAgainstDeterminant) {
    const int N = 16, n = 100000;
    std::vector<double> v;
    for (int t = 0; t < n; ++t) {
        auto smp = sample_cue(N, 5, t);
        cplx s = 0;
        for (double a : smp.angles) s += std::polar(1.0, a);
        v.push_back(std::norm(s));
    }
    // E|sum e^{i theta}|^2 = (1/2) d^2/dt^2 log det T_N(e^{2 t cos theta}) at t = 0
    const double h = 1e-3;
    auto ld = [&](double t) { return toeplitz_laplace(N, ToeplitzSymbol::real_symbol({0.0, t})).log_abs; };
    const double oracle = 0.5 * (ld(h) - 2 * ld(0) + ld(-h)) / (h * h);
    EXPECT_NEAR(oracle, 1.0, 1e-5);
    auto m = stats(v);
    EXPECT_LE(std::abs(m.mean - oracle), 4 * m.se);
}

TEST(Sampler, SingleAngleIsUniform) {
    const int n = 10000;
    std::vector<double> u;
    for (int t = 0; t < n; ++t) u.push_back(sample_cue(1, 13, t).angles[0] / kTwoPi);
    std::sort(u.begin(), u.end());
    double D = 0;
    for (int i = 0; i < n; ++i) D = std::max({D, (i + 1.0) / n - u[i], u[i] - static_cast<double>(i) / n});
    EXPECT_LT(D, 1.628 / std::sqrt(static_cast<double>(n)));
}

TEST(Statistic, ZeroWeightsAndPointMassLimit) {
    auto smp = sample_cue(64, 2, 0);
    MesoscopicStatistic s = two_point(64);
    s.weights = {0.0, 0.0};
    EXPECT_EQ(smoothed_statistic(smp, s).value, 0.0);
    MesoscopicStatistic p;
    p.N = 64;
    p.alpha = 0.5;
    p.centers = {0.3};
    p.weights = {1.0};
    p.scales = {1e-9};
    const double na = p.scale_factor();
    int count = 0;
    for (double a : smp.angles) {
        double x = na * (a > kPi ? a - kTwoPi : a);
        if (std::abs(x - 0.3) <= 0.5) ++count;
    }
    EXPECT_NEAR(smoothed_statistic(smp, p).value, kPi * count, 1e-6);
    EXPECT_LT(p.periodization_bound(), 1e-8);
}

TEST(Statistic, MeanMatchesZerothCoefficient) {
    const int N = 32;
    auto s = two_point(N);
    auto sym = symbol_coeffs(s);
    std::vector<double> x;
    for (int t = 0; t < 4000; ++t) x.push_back(smoothed_statistic(sample_cue(N, 31, t), s).value);
    auto m = stats(x);
    EXPECT_LE(std::abs(m.mean - N * sym.coeff(0).real()), 4 * m.se);
    EXPECT_NEAR(N * sym.coeff(0).real(), std::pow(N, 1 - s.alpha) * s.gamma * s.ell * 2 / 2, 1e-10);
}

TEST(Symbol, HermitianAndMacroscopicLimit) {
    double prev = 1e300;
    for (int N : {64, 256, 1024}) {
        auto s = two_point(N, 1.0, 0.1);
        auto sym = symbol_coeffs(s);
        for (long k = 1; k <= 5; ++k) EXPECT_NEAR(std::abs(sym.coeff(-k) - std::conj(sym.coeff(k))), 0.0, 1e-16);
        EXPECT_LT(sym.truncation_tail(), 1e-12);
        const double sum = sym.szego_sum();
        const double limit = gaussian_prediction(s);  // int_0^inf kappa |h^|^2
        const double gap = std::abs(sum - limit);
        EXPECT_LT(gap, 1e-2 * limit) << N;
        EXPECT_LT(gap, prev);
        prev = gap;
    }
}

TEST(Toeplitz, TrivialSymbols) {
    EXPECT_NEAR(toeplitz_laplace(7, ToeplitzSymbol::real_symbol({0.0})).log_abs, 0.0, 1e-14);
    auto sym = ToeplitzSymbol::real_symbol({0.1, 0.4, 0.2});
    auto logw = [&](double th) { return 0.1 + 2 * 0.4 * std::cos(th) + 2 * 0.2 * std::cos(2 * th); };
    const double w0 = boost::math::quadrature::trapezoidal([&](double th) { return std::exp(logw(th)); }, 0.0, kTwoPi, 1e-14) / kTwoPi;
    EXPECT_NEAR(toeplitz_laplace(1, sym).log_abs, std::log(w0), 1e-12);
}

TEST(Toeplitz, TwoByTwoBesselDeterminant) {
    const double i0 = std::cyl_bessel_i(0.0, 0.6), i1 = std::cyl_bessel_i(1.0, 0.6);
    EXPECT_NEAR(toeplitz_laplace(2, ToeplitzSymbol::real_symbol({0.0, 0.3})).log_abs, std::log(i0 * i0 - i1 * i1), 1e-12);
}

TEST(Toeplitz, MonteCarloAverage) {
    const int N = 8, n = 100000;
    auto sym = ToeplitzSymbol::real_symbol({0.0, 0.3, cplx(0.1, 0.2)});
    std::vector<double> e;
    for (int t = 0; t < n; ++t) {
        double s = 0;
        for (double a : sample_cue(N, 8, t).angles)
            s += 2 * 0.3 * std::cos(a) + 2 * (0.1 * std::cos(2 * a) - 0.2 * std::sin(2 * a));
        e.push_back(std::exp(s));
    }
    auto m = stats(e);
    EXPECT_LE(std::abs(std::log(m.mean) - toeplitz_laplace(N, sym).log_abs), 4 * m.se / m.mean);
}

TEST(BorodinOkounkov, Identity) {
    for (int N : {4, 8, 16})
        for (const auto& [name, sym] : symbols(N)) {
            const double ld = toeplitz_laplace(N, sym).log_abs;
            const double bo = bo_rhs(N, sym).log_value;
            EXPECT_LT(std::abs(ld - bo), 1e-8 * std::max(1.0, std::abs(ld))) << name << " N=" << N;
        }
    EXPECT_NEAR(bo_rhs(5, ToeplitzSymbol::real_symbol({0.0})).log_value, 0.0, 1e-15);
}

TEST(BorodinOkounkov, HankelFactorDecays) {
    auto sym = ToeplitzSymbol::real_symbol({0.0, 0.5, 0.3, 0.1});
    double prev = 1e300;
    for (int N : {1, 2, 3, 4, 6}) {
        const double f = std::abs(bo_rhs(N, sym).log_fredholm);
        EXPECT_LT(f, prev) << N;
        prev = f;
    }
}

TEST(HsTail, ZeroMonotoneAndScaling) {
    EXPECT_EQ(hs_tail(ToeplitzSymbol::real_symbol({0.0}), 4), 0.0);
    auto sym = ToeplitzSymbol::real_symbol({0.0, 0.5, 0.3, 0.1});
    for (int N = 1; N < 6; ++N) EXPECT_LT(hs_tail(sym, N + 1), hs_tail(sym, N));
    // eps = N^{alpha - 1 + delta}: the tail shrinks like a negative power of N
    const double alpha = 0.5, delta = 0.2;
    std::vector<double> lx, ly;
    for (int N : {32, 64, 128, 256}) {
        MesoscopicStatistic s = two_point(N);
        s.scales.assign(2, std::pow(N, alpha - 1 + delta));
        lx.push_back(std::log(N));
        ly.push_back(std::log(hs_tail(symbol_coeffs(s), N)));
    }
    const double slope = (ly.back() - ly.front()) / (lx.back() - lx.front());
    EXPECT_LT(slope, 0.0);
}

TEST(Variance, SecondDifferenceOracle) {
    const int N = 32;
    for (const auto& [name, sym] : symbols(N)) {
        const double h = 1e-3;
        auto ld = [&](double t) { return toeplitz_laplace(N, sym.scaled(t)).log_abs; };
        const double fd = (ld(h) - 2 * ld(0) + ld(-h)) / (h * h);
        const double v = exact_variance(sym, N);
        EXPECT_NEAR(v, fd, 1e-6 * std::abs(v)) << name;
    }
}

TEST(Prediction, OnePointAndZero) {
    MesoscopicStatistic s = two_point(64);
    s.weights = {0.0, 0.0};
    EXPECT_EQ(gaussian_prediction(s), 0.0);
    MesoscopicStatistic one;
    one.N = 64;
    one.centers = {0.2};
    one.weights = {0.7};
    one.scales = {0.1};
    one.gamma = 1.0;
    const auto g = Mollifier::gaussian();
    EXPECT_NEAR(gaussian_prediction(one), 0.5 * 0.49 * covariance::t_exact(0.2, 0.2, 0.1, 0.1, g, g).value, 1e-12);
}

TEST(Prediction, ErrorShrinksWithN) {
    double prev = 1e300;
    for (int N : {64, 128, 256}) {
        auto s = two_point(N);
        auto sym = symbol_coeffs(s);
        const double centered = toeplitz_laplace(N, sym).log_abs - N * sym.coeff(0).real();
        const double err = std::abs(centered - gaussian_prediction(s));
        EXPECT_LT(err, prev) << N;
        prev = err;
    }
}

TEST(Chaos, FlatLimitAndMass) {
    ChaosSetting cs;
    cs.N = 64;
    cs.gamma = 1e-9;
    std::vector<double> grid{0.0, 0.25, 0.5};
    auto d = cue_chaos_measure({sample_cue(64, 1, 0)}, cs, grid);
    for (double v : d[0]) EXPECT_NEAR(v, 1.0, 1e-7);
    cs.gamma = 0.5;
    std::vector<double> u;
    const int panels = 20;
    for (int i = 0; i < panels; ++i) u.push_back((i + 0.5) / panels);
    std::vector<double> masses;
    std::vector<EigenangleSample> samples;
    cs.N = 32;
    for (int t = 0; t < 2000; ++t) samples.push_back(sample_cue(32, 41, t));
    for (const auto& row : cue_chaos_measure(samples, cs, u)) {
        double m = 0;
        for (double v : row) m += v / panels;
        masses.push_back(m);
    }
    auto m = stats(masses);
    EXPECT_LE(std::abs(m.mean - 1.0), 4 * m.se);
}

TEST(Chaos, SecondMomentThroughDeterminants) {
    ChaosSetting cs;
    cs.N = 512;
    cs.eps = 0.05;
    cs.gamma = 0.5;
    auto m = cue_second_moment(cs, 1.0);
    const auto g = field::exact_gaussian_moment(2, 0.5, field::Weight{0.0, 1.0, {}}, 0.05);
    EXPECT_NEAR(m.value / g.value, 1.0, 0.02);
    EXPECT_LT(m.error, 1e-4);
}
