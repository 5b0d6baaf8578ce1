#include "mesochaos/specfun.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <string>

#include "mesochaos/quadrature.hpp"

namespace mesochaos::specfun {

double log_gamma(double x) {
    if (!(x > 0)) throw DomainError("log_gamma: argument must be positive");
    return std::lgamma(x);
}

double gamma(double x) {
    if (x <= 0 && x == std::floor(x)) throw DomainError("gamma: pole at non-positive integer");
    return std::tgamma(x);
}

namespace {

double cin_series(double x) {
    // sum_{k>=1} (-1)^{k+1} x^{2k} / (2k (2k)!)
    const double x2 = x * x;
    double term = x2 / 2.0;  // x^{2k}/(2k)! at k = 1
    double sum = 0.0;
    for (int k = 1; k < 60; ++k) {
        double contrib = term / (2.0 * k);
        sum += (k % 2 == 1) ? contrib : -contrib;
        if (contrib < 1e-18 * std::abs(sum)) break;
        term *= x2 / ((2.0 * k + 1.0) * (2.0 * k + 2.0));
    }
    return sum;
}

// Ci via the continued fraction of E1(ix); valid for |x| > 2.
double ci_continued_fraction(double t) {
    using C = std::complex<double>;
    const double tiny = 1e-300;
    C b(1.0, t);
    C c(1.0 / tiny, 0.0);
    C d = 1.0 / b;
    C h = d;
    for (int i = 2; i < 10000; ++i) {
        double a = -static_cast<double>((i - 1) * (i - 1));
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        C del = c * d;
        h *= del;
        if (std::abs(del.real() - 1.0) + std::abs(del.imag()) < 1e-15) break;
    }
    h *= C(std::cos(t), -std::sin(t));
    return -h.real();
}

constexpr double kSeriesLimit = 4.0;

}  // namespace

double cin(double x) {
    double t = std::abs(x);
    if (t <= kSeriesLimit) return cin_series(t);
    return std::log(t) + kEulerGamma - ci_continued_fraction(t);
}

double ci(double x) {
    if (x == 0.0) throw DomainError("ci: logarithmic singularity at 0");
    double t = std::abs(x);
    if (t <= kSeriesLimit) return std::log(t) + kEulerGamma - cin_series(t);
    return ci_continued_fraction(t);
}

namespace {

// log G(1 + w) for large w
double log_barnes_asymptotic(double w) {
    static constexpr double coeff[] = {
        -1.0 / 240.0,                 // B4 / (4*1*2)
        1.0 / 1008.0,                 // B6 / (4*2*3)
        -1.0 / 1440.0,                // B8 / (4*3*4)
        1.0 / 1056.0,                 // B10 / (4*4*5)
        -691.0 / 2730.0 / 120.0,      // B12 / (4*5*6)
        7.0 / 6.0 / 168.0,            // B14 / (4*6*7)
    };
    const double lw = std::log(w);
    double s = 0.5 * w * w * lw - 0.75 * w * w + 0.5 * w * std::log(kTwoPi) - lw / 12.0 +
               kZetaPrimeMinusOne;
    double inv2 = 1.0 / (w * w), p = inv2;
    for (double c : coeff) {
        s += c * p;
        p *= inv2;
    }
    return s;
}

constexpr double kAsymptoticStart = 20.0;

}  // namespace

double log_barnes_g(double z) {
    if (!(z > 0)) throw DomainError("barnes_g: argument must be positive");
    // G(z) = G(z + n) / prod_{j<n} Gamma(z + j)
    double shift = 0.0;
    while (z < kAsymptoticStart + 1.0) {
        shift += std::lgamma(z);
        z += 1.0;
    }
    return log_barnes_asymptotic(z - 1.0) - shift;
}

double barnes_g(double z) { return std::exp(log_barnes_g(z)); }

LogValue fyodorov_keating_constant(double g, int q) {
    double lv = 2.0 * q * log_barnes_g(1.0 + g / std::sqrt(2.0)) -
                q * log_barnes_g(1.0 + g * std::sqrt(2.0));
    return from_log(lv);
}

LogValue selberg_unit(int n, double gt) {
    if (n < 1) throw DomainError("selberg_unit: n must be positive");
    if (gt < 0) throw DomainError("selberg_unit: exponent must be non-negative");
    if (n * gt >= 1.0)
        throw DivergenceError("selberg_unit: diverges for n*gt >= 1 (n=" + std::to_string(n) +
                              ", gt=" + std::to_string(gt) + ")");
    double lv = 0.0;
    for (int j = 0; j < n; ++j) {
        lv += 2.0 * std::lgamma(1.0 - j * gt) + std::lgamma(1.0 - (j + 1) * gt) -
              std::lgamma(2.0 - (n + j - 1) * gt) - std::lgamma(1.0 - gt);
    }
    return from_log(lv);
}

double structure_exponent(int q, double g) { return q - g * g * q * (q - 1) / 2.0; }

LogValue selberg_interval_moment(int q, double g, double r) {
    if (q < 1) throw DomainError("selberg_interval_moment: q must be positive");
    if (!(r > 0)) throw DomainError("selberg_interval_moment: r must be positive");
    if (g * g * q >= 2.0) throw DivergenceError("selberg_interval_moment: gamma^2 q >= 2");
    LogValue s = selberg_unit(q, g * g / 2.0);
    return from_log(structure_exponent(q, g) * std::log(r) + s.log_value);
}

LogValue dyson_circle(int q, double g) {
    if (q < 1) throw DomainError("dyson_circle: q must be positive");
    const double g2 = g * g;
    if (g2 * q >= 2.0) throw DivergenceError("dyson_circle: gamma^2 q >= 2");
    double lv = q * std::log(kTwoPi) + std::lgamma(1.0 - g2 * q / 2.0) -
                q * std::lgamma(1.0 - g2 / 2.0);
    return from_log(lv);
}

namespace {

void check_quadrature_args(int q, double g2) {
    if (q < 1 || q > 3) throw DomainError("quadrature cross-check: q must lie in {1, 2, 3}");
    if (g2 * q >= 2.0) throw DivergenceError("quadrature cross-check: gamma^2 q >= 2");
}

}  // namespace

Estimate selberg_interval_quadrature(int q, double g, double r) {
    const double g2 = g * g;
    check_quadrature_args(q, g2);
    if (!(r > 0)) throw DomainError("selberg_interval_quadrature: r must be positive");
    if (q == 1) return {r, 0.0};
    if (q == 2) {
        // d = r t^p with p (1 - gamma^2) = 1 absorbs the endpoint power.
        const double p = 1.0 / (1.0 - g2);
        auto run = [&](int m) {
            return 2.0 * p * std::pow(r, 2.0 - g2) *
                   graded_gauss_legendre(0.0, 1.0, m, 12, 0.5).integrate([&](double t) { return 1.0 - std::pow(t, p); });
        };
        double fine = run(24), coarse = run(16);
        return {fine, std::abs(fine - coarse)};
    }
    auto f = [&](std::span<const double> z) {
        double p = std::abs(z[0] - z[1]) * std::abs(z[0] - z[2]) * std::abs(z[1] - z[2]);
        return p > 0 ? std::pow(p, -g2) : 0.0;
    };
    Estimate e = randomized_kronecker(f, 3, std::size_t{1} << 17, 16, 0x5e1b);
    const double scale = std::pow(r, structure_exponent(3, g));
    return {e.value * scale, e.error * scale};
}

Estimate dyson_circle_quadrature(int q, double g) {
    const double g2 = g * g;
    check_quadrature_args(q, g2);
    if (q == 1) return {kTwoPi, 0.0};
    auto chord = [](double t) { return std::abs(2.0 * std::sin(0.5 * t)); };
    if (q == 2) {
        // Symmetric about pi; theta = pi t^p on [0, pi] absorbs the power at 0.
        const double p = 1.0 / (1.0 - g2);
        auto run = [&](int m) {
            auto f = [&](double t) {
                if (t == 0.0) return 1.0;
                double th = kPi * std::pow(t, p);
                return std::pow(th / chord(th), g2);
            };
            return 2.0 * kTwoPi * p * std::pow(kPi, 1.0 - g2) * graded_gauss_legendre(0.0, 1.0, m, 12, 0.5).integrate(f);
        };
        double fine = run(24), coarse = run(16);
        return {fine, std::abs(fine - coarse)};
    }
    // Rotation fixes theta_1 = 0.
    auto f = [&](std::span<const double> z) {
        double a = kTwoPi * z[0], b = kTwoPi * z[1];
        double p = chord(a) * chord(b) * chord(a - b);
        return p > 0 ? std::pow(p, -g2) : 0.0;
    };
    Estimate e = randomized_kronecker(f, 2, std::size_t{1} << 17, 16, 0xd150);
    const double scale = kTwoPi * kTwoPi * kTwoPi;
    return {e.value * scale, e.error * scale};
}

}  // namespace mesochaos::specfun
