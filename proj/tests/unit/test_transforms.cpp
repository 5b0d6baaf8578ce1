#include <cmath>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "mesochaos/covariance.hpp"
#include "mesochaos/transforms.hpp"

using namespace mesochaos;
using namespace mesochaos::transforms;

namespace {

SampledFunction on_grid(const std::function<double(double)>& f, double a, double b, double h) {
    return SampledFunction::sample(f, a, h, static_cast<std::size_t>(std::llround((b - a) / h)));
}

// Sum of Gaussian wave packets with negligible zero-frequency content.
std::function<double(double)> random_packets(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> amp(-1, 1), c(-2, 2), s(0.6, 1.0), k(2.5, 6.0), ph(0, kTwoPi);
    struct P { double a, c, s, k, p; };
    std::vector<P> ps;
    for (int j = 0; j < 4; ++j) ps.push_back({amp(rng), c(rng), s(rng), k(rng), ph(rng)});
    return [ps](double x) {
        double v = 0;
        for (const auto& p : ps) v += p.a * std::exp(-0.5 * (x - p.c) * (x - p.c) / (p.s * p.s)) * std::cos(kTwoPi * p.k * x + p.p);
        return v;
    };
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST(Sampled, PadsToPowerOfTwo) {
    auto f = SampledFunction::from_real(0.0, 0.1, std::vector<double>(100, 1.0));
    EXPECT_EQ(f.size(), 128u);
    EXPECT_EQ(f.values[127], cplx(0.0));
    SampledFunction empty;
    EXPECT_THROW(fourier(empty), DomainError);
}

TEST(Fourier, SelfDualGaussian) {
    auto f = on_grid([](double x) { return std::exp(-kPi * x * x); }, -8, 8, 1.0 / 64);
    auto F = fourier(f);
    for (std::size_t k = 0; k < F.size(); ++k) {
        const double kappa = F.x(k);
        if (std::abs(kappa) > 4) continue;
        EXPECT_NEAR(F.values[k].real(), std::exp(-kPi * kappa * kappa), 1e-8);
        EXPECT_NEAR(F.values[k].imag(), 0.0, 1e-8);
    }
}

TEST(Fourier, ZeroAndPlancherel) {
    auto z = fourier(on_grid([](double) { return 0.0; }, -1, 1, 0.01));
    for (auto v : z.values) EXPECT_EQ(std::abs(v), 0.0);
    std::mt19937_64 rng(3);
    auto f = on_grid(random_packets(rng), -16, 16, 1.0 / 32);
    auto F = fourier(f);
    double a = 0, b = 0;
    for (auto v : f.values) a += std::norm(v) * f.step;
    for (auto v : F.values) b += std::norm(v) * F.step;
    EXPECT_NEAR(a, b, 1e-10 * a);
}

TEST(Fourier, IndicatorTransform) {
    const double h = 1.0 / 4096;
    // pi on |x| < 1/2, half value at the two jumps
    auto f = on_grid([h](double x) {
        const double d = std::abs(x) - 0.5;
        if (std::abs(d) < 0.5 * h) return kPi / 2;
        return d < 0 ? kPi : 0.0;
    }, -4, 4, h);
    auto F = fourier(f);
    for (std::size_t k = 0; k < F.size(); ++k) {
        const double kappa = F.x(k);
        if (std::abs(kappa) > 4) continue;
        const double exact = kappa == 0 ? kPi : std::sin(kPi * kappa) / kappa;
        EXPECT_NEAR(F.values[k].real(), exact, 1e-6) << kappa;
    }
}

TEST(Hilbert, InvolutionOnWavePackets) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        auto f = on_grid(random_packets(rng), -16, 16, 1.0 / 32);
        auto hh = hilbert(hilbert(f));
        double err = 0;
        for (std::size_t i = 0; i < f.size(); ++i) err = std::max(err, std::abs(hh.values[i].real() + f.values[i].real()));
        EXPECT_LT(err, 1e-8);
    }
    auto z = hilbert(on_grid([](double) { return 0.0; }, -1, 1, 0.01));
    for (auto v : z.values) EXPECT_EQ(std::abs(v), 0.0);
}

TEST(Hilbert, CommutesWithDerivative) {
    const double h = 1.0 / 64;
    auto f = on_grid([](double x) { return std::exp(-x * x); }, -16, 16, h);
    auto fp = on_grid([](double x) { return -2 * x * std::exp(-x * x); }, -16, 16, h);
    auto dh = derivative(hilbert(f).real_values(), h);
    auto hd = hilbert(fp).real_values();
    for (std::size_t i = 0; i < f.size(); ++i)
        if (std::abs(f.x(i)) < 8) EXPECT_NEAR(dh[i], hd[i], 1e-6) << f.x(i);
}

TEST(Cauchy, JumpAndPrincipalValue) {
    auto gauss = [](double x) { return std::exp(-x * x); };
    auto f = on_grid(gauss, -16, 16, 1.0 / 64);
    auto plus = cauchy_boundary(f, Side::plus), minus = cauchy_boundary(f, Side::minus);
    for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(std::abs(plus.values[i] - minus.values[i] - f.values[i]), 0.0, 1e-14);
    for (double target : {0.0, 0.3, -1.1}) {
        const std::size_t i = static_cast<std::size_t>(std::llround((target - f.start) / f.step));
        const double x0 = f.x(i);
        // PV int f(t)/(t - x0) dt with symmetric node cancellation
        auto odd = [&](double s) { return s == 0 ? -4 * x0 * gauss(x0) : (gauss(x0 + s) - gauss(x0 - s)) / s; };
        const double pv = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(odd, 0.0, 30.0, 20, 1e-14);
        const cplx oracle = 0.5 * gauss(x0) + pv / cplx(0, kTwoPi);
        EXPECT_NEAR(std::abs(plus.values[i] - oracle), 0.0, 1e-6) << x0;
    }
}

TEST(HalfNorm, ZeroInput) {
    auto z = on_grid([](double) { return 0.0; }, -4, 4, 1.0 / 64);
    auto g = on_grid([](double x) { return std::exp(-x * x); }, -4, 4, 1.0 / 64);
    for (auto m : {InnerMethod::spectral, InnerMethod::double_integral, InnerMethod::hilbert_pairing})
        EXPECT_EQ(h_half_inner(z, g, m).value, 0.0);
}

TEST(HalfNorm, ThreeMethodsAgreeOnBump) {
    const double s = 0.5;
    auto bump = on_grid([s](double x) { return std::exp(-0.5 * x * x / (s * s)); }, -8, 8, 1.0 / 64);
    const double exact = 1.0 / kTwoPi;  // int |kappa| |h^|^2 = c^2 / 2 pi for c = 1
    const double a = h_half_inner(bump, bump, InnerMethod::spectral).value;
    const double b = h_half_inner(bump, bump, InnerMethod::double_integral).value;
    const double c = h_half_inner(bump, bump, InnerMethod::hilbert_pairing).value;
    EXPECT_NEAR(a, exact, 1e-8);
    EXPECT_NEAR(b / a, 1.0, 1e-4);
    EXPECT_NEAR(c / a, 1.0, 1e-4);
}

TEST(HalfNorm, DoubleIntegralConvergesUnderRefinement) {
    auto f = [](double x) { return std::exp(-2 * x * x) * (1 + 0.3 * x); };
    double prev = 0;
    const double ref = h_half_inner(on_grid(f, -8, 8, 1.0 / 128), on_grid(f, -8, 8, 1.0 / 128), InnerMethod::spectral).value;
    for (double h : {1.0 / 8, 1.0 / 16, 1.0 / 32}) {
        auto g = on_grid(f, -8, 8, h);
        const double gap = std::abs(h_half_inner(g, g, InnerMethod::double_integral).value - ref);
        if (prev > 0) EXPECT_LT(gap, 0.5 * prev) << h;
        prev = gap;
    }
}

TEST(HalfNorm, MatchesMollifiedCovariance) {
    const double eps = 0.1;
    auto phi = Mollifier::gaussian();
    auto f = on_grid([&](double x) { return covariance::smoothed_indicator(x, 0.0, eps, phi); }, -8, 8, 1.0 / 256);
    const double spectral = h_half_inner(f, f, InnerMethod::spectral).value;
    const double t = covariance::t_exact(0, 0, eps, eps, phi, phi).value;
    EXPECT_NEAR(spectral, t, 1e-6);
}

TEST(HalfNorm, PairingRejectsRoughInput) {
    auto box = on_grid([](double x) { return std::abs(x) < 1 ? 1.0 : 0.0; }, -4, 4, 1.0 / 64);
    EXPECT_THROW(h_half_inner(box, box, InnerMethod::hilbert_pairing), DomainError);
    auto other = on_grid([](double x) { return x; }, -2, 2, 1.0 / 64);
    EXPECT_THROW(h_half_inner(box, other, InnerMethod::spectral), DomainError);
}
