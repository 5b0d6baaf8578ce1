#include <cmath>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "mesochaos/covariance.hpp"
#include "mesochaos/quadrature.hpp"
#include "mesochaos/transforms.hpp"

using namespace mesochaos;
using namespace mesochaos::covariance;

namespace {

double gk(const std::function<double(double)>& f, double a, double b) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-13);
}

}  // namespace

class MollifierTest : public ::testing::TestWithParam<const char*> {};

TEST_P(MollifierTest, DensityAndTransform) {
    const Mollifier phi = Mollifier::from_name(GetParam());
    const double R = phi.kind() == MollifierKind::cauchy_like ? 1e6 : phi.tail_radius(1e-18);
    double mass = 0;
    std::vector<double> edges{-R, -10, -1, 0, 1, 10, R};
    if (R <= 10) edges = {-R, 0, R};
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) mass += gk([&](double x) { return phi.density(x); }, edges[i], edges[i + 1]);
    EXPECT_NEAR(mass, 1.0, phi.kind() == MollifierKind::cauchy_like ? 1e-6 : 1e-10);
    EXPECT_NEAR(phi.fourier(0.0), 1.0, 1e-14);
    for (double x : {-3.0, -0.4, 0.0, 0.7, 2.0}) EXPECT_GE(phi.density(x), 0.0);
    for (double k : {0.1, 0.5, 1.3}) {
        if (phi.kind() == MollifierKind::cauchy_like) continue;
        const double oracle = 2 * gk([&](double x) { return phi.density(x) * std::cos(kTwoPi * k * x); }, 0, std::min(R, 40.0));
        EXPECT_NEAR(phi.fourier(k), oracle, 1e-9) << k;
    }
    const double a = phi.moment_order();
    const double m = 2 * gk([&](double x) { return std::pow(x, a * 0.99) * phi.density(x); }, 0, std::min(R, 1e3));
    EXPECT_TRUE(std::isfinite(m));
}

INSTANTIATE_TEST_SUITE_P(All, MollifierTest, ::testing::Values("gaussian", "smooth_bump", "cauchy_like"));

TEST(QKernel, EvenAndExplicitValue) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.01, 3.0);
    for (int i = 0; i < 20; ++i) {
        double x = u(rng);
        if (std::abs(x - 1.0) < 1e-3) continue;
        EXPECT_DOUBLE_EQ(q_kernel(x), q_kernel(-x));
    }
    EXPECT_NEAR(q_kernel(0.5), -std::log(0.5) + 0.5 * std::log(0.75), 1e-15);
    EXPECT_THROW(q_kernel(0.0), DomainError);
    EXPECT_THROW(q_kernel(1.0), DomainError);
    EXPECT_THROW(q_kernel(0.5, KernelParams{0.0}), DomainError);
}

TEST(QKernel, HalfNormPairingOfIndicators) {
    auto box = [](double u, double h) {
        return [u, h](double x) {
            const double d = std::abs(x - u) - 0.5;
            if (std::abs(d) < 0.5 * h) return kPi / 2;
            return d < 0 ? kPi : 0.0;
        };
    };
    // jumps leave an O(h) spectral truncation error, so check convergence as well as the value
    double prev = 1e300;
    for (double h : {1.0 / 512, 1.0 / 2048}) {
        const std::size_t n = static_cast<std::size_t>(8 / h);
        auto a = transforms::SampledFunction::sample(box(0.0, h), -4, h, n);
        auto b = transforms::SampledFunction::sample(box(0.3, h), -4, h, n);
        const double gap = std::abs(transforms::h_half_inner(a, b, transforms::InnerMethod::spectral).value - q_kernel(0.3));
        EXPECT_LT(gap, 0.5 * prev) << h;
        prev = gap;
    }
    EXPECT_LT(prev, 2e-3);
}

TEST(QEps, ClampsAndBounds) {
    const KernelParams p{1.0};
    for (double x : {0.05, 0.3, 0.8, 1.5, -0.6}) EXPECT_NEAR(q_eps(x, 0.01, p), q_kernel(x, p), 1e-14) << x;
    for (double eps : {0.5, 0.1, 1e-3}) EXPECT_NEAR(q_eps(0.0, eps, p), std::log(kTwoPi / eps), 1e-13);
    EXPECT_NEAR(q_eps(0.0, 0.1, KernelParams{2.0}), std::log(kTwoPi / 0.1) + std::log(2.0), 1e-13);
    for (double eps : {1.0, 0.1, 1e-3})
        for (double x = -3; x <= 3; x += 0.01) {
            const double bound = std::max(0.0, std::log(1.0 / std::min(std::abs(x), eps))) + std::sqrt(2.0);
            EXPECT_LE(q_eps(x, eps, p), bound + 1e-12) << x << ' ' << eps;
        }
}

TEST(QHat, SignZerosAndReconstruction) {
    for (double k = -5; k <= 5; k += 0.013) EXPECT_GE(q_hat(k), 0.0);
    EXPECT_NEAR(q_hat(1.0), 0.0, 1e-15);
    EXPECT_NEAR(q_hat(0.5, KernelParams{2.0}), 0.0, 1e-15);
    // Q(x) - Q(y) = 2 int_0^inf q^(k) (cos 2 pi k x - cos 2 pi k y) dk
    const double x = 0.3, y = 0.6, K = 4000;
    const double body = integrate_panels([&](double k) { return 2 * q_hat(k) * (std::cos(kTwoPi * k * x) - std::cos(kTwoPi * k * y)); }, 0, K, 0.05);
    EXPECT_NEAR(body, q_kernel(x) - q_kernel(y), 1e-4);
}

TEST(CinError, TrivialProfilesAndLimit) {
    FrequencyProfile gauss{[](double k) { return std::exp(-k * k); }, 0};
    EXPECT_NEAR(cin_error_term(0.0, gauss).value, 0.0, 1e-15);
    FrequencyProfile sharp{[](double k) { return k <= 1 ? 1.0 : 0.0; }, 0};
    for (double w : {0.5, 10.0, 300.0}) EXPECT_NEAR(cin_error_term(w, sharp).value, 0.0, 1e-14);
    // int_0^inf (e^{-k^2} - 1{k<=1})/k dk = -gamma_E / 2
    EXPECT_NEAR(cin_error_limit(gauss), -0.5 * 0.57721566490153286, 1e-10);
    // the jump of the integrand at k = 1 leaves sin(w)/w + O(1/w^2)
    for (double w : {1e2, 1e3})
        EXPECT_NEAR(cin_error_term(w, gauss).value - cin_error_limit(gauss), std::sin(w) / w, 5 / (w * w)) << w;
}

TEST(TExact, SymmetryAndBruteForce) {
    const auto g = Mollifier::gaussian(), b = Mollifier::smooth_bump();
    EXPECT_NEAR(t_exact(0.2, 0.7, 0.05, 0.1, g, b).value, t_exact(0.7, 0.2, 0.1, 0.05, b, g).value, 1e-12);
    for (double x : {0.0, 0.3, 1.0, 1.7})
        for (double eps : {0.1, 0.02})
            EXPECT_NEAR(t_exact(x, 0, eps, eps, g, g).value, t_bruteforce(x, 0, eps, eps, g, g), 1e-7) << x << ' ' << eps;
}

TEST(TExact, LogarithmicOnTheDiagonal) {
    const auto g = Mollifier::gaussian();
    for (double eps : {1e-2, 1e-3})
        EXPECT_NEAR(t_exact(0, 0, eps / 2, eps / 2, g, g).value - t_exact(0, 0, eps, eps, g, g).value, std::log(2.0), 0.02);
}

TEST(TExact, SpectralQuadratureOracle) {
    const auto g = Mollifier::gaussian();
    const double eps = 0.1, x = 0.4;
    const double oracle = 2 * integrate_panels([&](double k) {
        const double f = g.fourier(eps * k);
        return std::cos(kTwoPi * k * x) * f * f * q_hat(k);
    }, 0, 60, 0.05);
    EXPECT_NEAR(t_exact(x, 0, eps, eps, g, g).value, oracle, 1e-10);
}

TEST(Suite, ConstantsStableUnderRefinement) {
    const auto g = Mollifier::gaussian();
    SuiteOptions coarse;
    auto a = assumption_suite(g, {}, coarse);
    SuiteOptions fine = coarse;
    fine.step = 0.25;
    fine.extent = 1.5;
    fine.scales = {1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
    auto b = assumption_suite(g, {}, fine);
    // a refined lattice may raise the sup a little; one global constant must still cover it
    EXPECT_LE(b.domination_constant, 1.25 * a.domination_constant);
    EXPECT_LE(b.q_eps_constant, 1.25 * a.q_eps_constant);
    EXPECT_LT(a.worst_halving_ratio(), 0.5);
    EXPECT_LT(a.band_width(), 1.0);
}
