#include <cmath>

#include <gtest/gtest.h>

#include "mesochaos/gaussian_field.hpp"
#include "mesochaos/specfun.hpp"

using namespace mesochaos;
using namespace mesochaos::field;

namespace {

const Mollifier kGauss = Mollifier::gaussian();

std::size_t index_of(const FieldRealization& f, double u) {
    return static_cast<std::size_t>(std::llround((u - f.grid.start) / f.grid.step));
}

}  // namespace

TEST(Plan, Invariants) {
    auto p = SpectralSynthesisPlan::make(0.0, 1.0, 0.05, kGauss, {});
    EXPECT_NO_THROW(p.validate());
    EXPECT_LE(p.dk * (p.grid.end() - p.grid.start), 0.25 + 1e-12);
    EXPECT_GE(p.cutoff * p.eps, 8.0);
    EXPECT_LE(p.grid.start, 0.0);
    EXPECT_GE(p.grid.end(), 1.0);
    EXPECT_THROW(SpectralSynthesisPlan::make(1.0, 0.0, 0.05, kGauss, {}), DomainError);
    EXPECT_THROW(SpectralSynthesisPlan::make(0.0, 1.0, 0.0, kGauss, {}), DomainError);
}

TEST(Plan, CovarianceMatchesExactKernel) {
    auto p = SpectralSynthesisPlan::make(0.0, 1.0, 0.05, kGauss, {});
    const double t0 = covariance::t_exact(0, 0, 0.05, 0.05, kGauss, kGauss).value;
    EXPECT_NEAR(p.variance(), t0, 1e-6 + p.cutoff_error());
    for (double d : {0.1, 0.5, 0.9})
        EXPECT_NEAR(p.covariance(d), covariance::t_exact(d, 0, 0.05, 0.05, kGauss, kGauss).value, 1e-6) << d;
}

TEST(Field, MeanAndCovarianceOverTrials) {
    // point values are exact at any grid step, so a coarse grid keeps the FFT small
    PlanOptions coarse;
    coarse.max_step = 0.05;
    auto p = SpectralSynthesisPlan::make(0.0, 1.0, 0.05, kGauss, {}, coarse);
    const int n = 10000;
    double s0 = 0, s00 = 0, s05 = 0, s55 = 0;
    for (int t = 0; t < n; ++t) {
        auto f = sample_field(p, 99, t);
        const double a = f.values[index_of(f, 0.0)], b = f.values[index_of(f, 0.5)];
        s0 += a;
        s00 += a * a;
        s55 += b * b;
        s05 += a * b;
    }
    const double mean = s0 / n, var = s00 / n - mean * mean;
    EXPECT_LE(std::abs(mean), 4 * std::sqrt(var / n));
    const double cov = s05 / n;
    const double target = covariance::t_exact(0, 0.5, 0.05, 0.05, kGauss, kGauss).value;
    const double se = std::sqrt((s00 / n) * (s55 / n) + cov * cov) / std::sqrt(static_cast<double>(n));
    EXPECT_LE(std::abs(cov - target), 4 * se);
}

TEST(Field, Reproducible) {
    auto p = SpectralSynthesisPlan::make(0.0, 1.0, 0.1, kGauss, {});
    auto a = sample_field(p, 5, 17), b = sample_field(p, 5, 17), c = sample_field(p, 5, 18);
    EXPECT_EQ(a.values, b.values);
    EXPECT_NE(a.values, c.values);
}

TEST(Field, VarianceGrowsByLogTwo) {
    PlanOptions coarse;
    coarse.dk = 1.0 / 16;
    coarse.max_step = 0.05;
    auto p = SpectralSynthesisPlan::make(0.0, 0.25, 0.025, kGauss, {}, coarse);
    const int n = 100000;
    double v1 = 0, v2 = 0;
    for (int t = 0; t < n; ++t) {
        auto fam = sample_field_family(p, {0.05, 0.025}, 3, t);
        const double a = fam[0].values[index_of(fam[0], 0.0)], b = fam[1].values[index_of(fam[1], 0.0)];
        v1 += a * a;
        v2 += b * b;
    }
    EXPECT_NEAR((v2 - v1) / n, std::log(2.0), 0.02);
}

TEST(Density, LimitsAndPositivity) {
    auto p = SpectralSynthesisPlan::make(0.0, 1.0, 0.05, kGauss, {});
    auto f = sample_field(p, 1, 0);
    auto flat = gmc_density(f, 1e-9);
    for (auto v : flat.values) EXPECT_NEAR(v.real(), 1.0, 1e-7);
    auto d = gmc_density(f, 1.2);
    for (auto v : d.values) {
        EXPECT_TRUE(std::isfinite(v.real()));
        EXPECT_GT(v.real(), 0.0);
    }
    EXPECT_THROW(gmc_density(f, 1.5), DomainError);
}

TEST(Mass, ConstantDensityAndAdditivity) {
    auto p = SpectralSynthesisPlan::make(0.0, 1.0, 0.05, kGauss, {});
    auto f = sample_field(p, 1, 0);
    auto one = gmc_density(f, 1e-12);
    EXPECT_NEAR(mass(one, Weight{0.0, 0.37, {}}), 0.37, 1e-9);
    auto d = gmc_density(f, 0.8);
    const double whole = mass(d, Weight{0.0, 1.0, {}});
    const double parts = mass(d, Weight{0.0, 0.3, {}}) + mass(d, Weight{0.3, 0.55, {}}) + mass(d, Weight{0.55, 1.0, {}});
    EXPECT_NEAR(whole, parts, 1e-12 * whole);
    EXPECT_THROW(mass(d, Weight{-5.0, 1.0, {}}), DomainError);
}

TEST(Mass, FirstAndSecondMomentsAgainstQuadrature) {
    const double eps = 0.02, g = 0.5;
    auto p = SpectralSynthesisPlan::make(0.0, 1.0, eps, kGauss, {});
    const Weight w{0.0, 1.0, {}};
    const int n = 4000;
    double s = 0, s2 = 0, s4 = 0;
    for (int t = 0; t < n; ++t) {
        const double m = mass(gmc_density(sample_field(p, 21, t), g), w);
        s += m;
        s2 += m * m;
        s4 += m * m * m * m;
    }
    const double m1 = s / n, m2 = s2 / n;
    EXPECT_LE(std::abs(m1 - 1.0), 4 * std::sqrt((m2 - m1 * m1) / n));
    const auto exact = exact_gaussian_moment(2, g, w, eps);
    EXPECT_LE(std::abs(m2 - exact.value), 4 * std::sqrt((s4 / n - m2 * m2) / n) + exact.error);
}

TEST(ExactMoment, TrivialCases) {
    const Weight w{0.0, 2.0, {}};
    EXPECT_NEAR(exact_gaussian_moment(1, 0.9, w, 0.05).value, 2.0, 1e-14);
    EXPECT_NEAR(exact_gaussian_moment(3, 0.0, w, 0.05).value, 8.0, 1e-12);
    EXPECT_THROW(exact_gaussian_moment(2, 1.0, w, 0.0), DivergenceError);
    EXPECT_THROW(exact_gaussian_moment(0, 0.5, w, 0.1), DomainError);
}

TEST(ExactMoment, LongWindowApproachesSelberg) {
    const double g = std::sqrt(0.5), ell = 1e4;
    const Weight w{0.0, 1.0, {}};
    const auto m = exact_gaussian_moment(2, g, w, 0.0, kGauss, {ell});
    const double pure = specfun::selberg_interval_moment(2, g, 1.0).value * std::pow(ell, g * g);
    EXPECT_NEAR(m.value / pure, 1.0, 1e-3);
}

TEST(ThickPoints, MonotoneAndDecaying) {
    const double g = 0.8, alpha = g + 0.5;
    const int K = 5;
    std::vector<double> scales;
    for (int k = 1; k <= K; ++k) scales.push_back(std::exp(-k));
    auto p = SpectralSynthesisPlan::make(0.0, 1.0, scales.back(), kGauss, {});
    const Weight w{0.0, 1.0, {}};
    const int n = 1000;
    std::vector<double> frac(K + 1, 0.0);
    double huge = 0;
    for (int t = 0; t < n; ++t) {
        auto fam = sample_field_family(p, scales, 8, t);
        for (int L = 1; L <= K; ++L) frac[L] += thick_point_fraction(fam, g, alpha, L, w) / n;
        huge += thick_point_fraction(fam, g, 10.0, 1, w) / n;
    }
    EXPECT_LT(huge, 1e-12);
    for (int L = 1; L < K; ++L) EXPECT_GE(frac[L], frac[L + 1]);
    EXPECT_GE(frac[2], 2 * frac[5]);
}
