#include "mesochaos/gaussian_field.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mesochaos/fft.hpp"
#include "mesochaos/quadrature.hpp"
#include "mesochaos/rng.hpp"

namespace mesochaos::field {

using covariance::KernelParams;

SpectralSynthesisPlan SpectralSynthesisPlan::make(double a, double b, double eps,
                                                  const Mollifier& phi, const KernelParams& kernel,
                                                  const PlanOptions& opts) {
    kernel.validate();
    if (!(b > a)) throw DomainError("synthesis window must have positive length");
    if (eps < 0) throw DomainError("eps must be non-negative");
    SpectralSynthesisPlan plan;
    plan.mollifier = phi;
    plan.kernel = kernel;
    plan.eps = eps;
    plan.unregularized = eps == 0.0;
    const double extent = b - a;
    plan.dk = std::min(opts.dk, 0.25 / extent);
    if (plan.unregularized) {
        if (!(opts.cutoff > 0)) throw DomainError("unregularized plan needs an explicit cutoff");
        plan.cutoff = opts.cutoff;
    } else {
        double tail = phi.frequency_cutoff(1e-6);
        plan.cutoff = opts.cutoff > 0 ? opts.cutoff : std::max(opts.cutoff_factor, tail) / eps;
    }
    double max_step = opts.max_step > 0 ? opts.max_step
                                        : (plan.unregularized ? 0.25 / plan.cutoff : eps / 8.0);
    // 4 * extent * dk <= 1 keeps the requested window inside a quarter period
    std::size_t m = next_power_of_two(static_cast<std::size_t>(std::ceil(1.0 / (plan.dk * max_step))));
    m = std::max<std::size_t>(m, 16);
    plan.fft_size = m;
    plan.grid.start = a;
    plan.grid.step = 1.0 / (static_cast<double>(m) * plan.dk);
    plan.grid.count = m / 4;
    plan.validate();
    auto table = std::make_shared<std::vector<double>>(plan.frequency_count() + 1, 0.0);
    for (std::size_t j = 1; j < table->size(); ++j) (*table)[j] = plan.amplitude(j);
    plan.amplitudes = std::move(table);
    return plan;
}

void SpectralSynthesisPlan::validate() const {
    kernel.validate();
    if (!(dk > 0) || !(cutoff > 0)) throw DomainError("plan: dk and cutoff must be positive");
    if (!is_power_of_two(fft_size)) throw DomainError("plan: FFT size must be a power of two");
    if (std::abs(grid.step * dk * static_cast<double>(fft_size) - 1.0) > 1e-9)
        throw DomainError("plan: grid step, dk and FFT size are inconsistent");
    double extent = grid.step * static_cast<double>(grid.count);
    if (dk * extent > 0.25 + 1e-12)
        throw DomainError("plan: dk * extent = " + std::to_string(dk * extent) +
                          " exceeds the periodization guard 1/4");
    if (!unregularized && cutoff * eps < 8.0 - 1e-12)
        throw DomainError("plan: cutoff * eps must be at least 8");
    if (unregularized && eps != 0.0) throw DomainError("plan: unregularized plan must have eps = 0");
}

std::size_t SpectralSynthesisPlan::frequency_count() const {
    return static_cast<std::size_t>(std::floor(cutoff / dk));
}

double SpectralSynthesisPlan::amplitude(std::size_t j, double eps_override) const {
    double e = eps_override >= 0 ? eps_override : eps;
    double k = static_cast<double>(j) * dk;
    double a = std::sin(kPi * kernel.ell * k) / std::sqrt(k) * std::sqrt(dk);
    return e > 0 ? a * mollifier.fourier(e * k) : a;
}

double SpectralSynthesisPlan::covariance(double d) const {
    double s = 0.0;
    for (std::size_t j = 1; j <= frequency_count(); ++j) {
        double c = amplitude(j);
        s += 2.0 * c * c * std::cos(kTwoPi * static_cast<double>(j) * dk * d);
    }
    return s + low_frequency_variance();
}

double SpectralSynthesisPlan::variance() const {
    double s = 0.0;
    for (std::size_t j = 1; j <= frequency_count(); ++j) {
        double c = amplitude(j);
        s += 2.0 * c * c;
    }
    return s + low_frequency_variance();
}

double SpectralSynthesisPlan::low_frequency_variance() const {
    const double a = kPi * kernel.ell * dk;
    return a * a / 6.0;
}

double SpectralSynthesisPlan::cutoff_error() const {
    if (unregularized) return std::numeric_limits<double>::infinity();
    double kmax = std::max(cutoff, mollifier.frequency_cutoff(1e-17) / eps);
    if (kmax <= cutoff) return 0.0;
    auto f = [&](double k) {
        double p = mollifier.fourier(eps * k);
        return 2.0 * p * p * covariance::q_hat(k, kernel);
    };
    return integrate_panels(f, cutoff, kmax, 0.5 / kernel.ell, 12);
}

namespace {

std::vector<FieldRealization> synthesize(const SpectralSynthesisPlan& plan,
                                         const std::vector<double>& eps_list, std::uint64_t seed,
                                         std::uint64_t trial) {
    plan.validate();
    const std::size_t m = plan.fft_size, nfreq = plan.frequency_count();
    Stream rng(seed, trial);
    std::vector<cplx> noise(nfreq + 1);
    const double r = std::sqrt(0.5);
    // e^{-2 pi i k_j x0} absorbed into the noise (same law), by recurrence refreshed every 64 steps
    const double dphase = -kTwoPi * plan.dk * plan.grid.start;
    const cplx rot = std::polar(1.0, dphase);
    cplx phase(1.0);
    for (std::size_t j = 1; j <= nfreq; ++j) {
        phase = j % 64 == 0 ? std::polar(1.0, dphase * static_cast<double>(j)) : phase * rot;
        double re = rng.normal(), im = rng.normal();
        noise[j] = cplx(r * re, r * im) * phase;
    }
    const double c0 = plan.low_frequency_variance();
    const double constant = std::sqrt(c0) * rng.normal();
    std::vector<FieldRealization> out;
    out.reserve(eps_list.size());
    std::vector<cplx> bins(m);
    for (double e : eps_list) {
        std::fill(bins.begin(), bins.end(), cplx(0.0));
        double var = 0.0;
        const bool cached = e == plan.eps && plan.amplitudes && plan.amplitudes->size() == nfreq + 1;
        for (std::size_t j = 1, bin = 1; j <= nfreq; ++j, bin = bin + 1 == m ? 0 : bin + 1) {
            double c = cached ? (*plan.amplitudes)[j] : plan.amplitude(j, e);
            bins[bin] += c * noise[j];
            var += 2.0 * c * c;
        }
        fft_forward(bins);
        FieldRealization f;
        f.grid = plan.grid;
        f.values.resize(plan.grid.count);
        for (std::size_t i = 0; i < plan.grid.count; ++i) f.values[i] = 2.0 * bins[i].real() + constant;
        f.variance = var + c0;
        f.eps = e;
        f.seed = seed;
        f.trial = trial;
        out.push_back(std::move(f));
    }
    return out;
}

}  // namespace

FieldRealization sample_field(const SpectralSynthesisPlan& plan, std::uint64_t seed,
                              std::uint64_t trial) {
    return synthesize(plan, {plan.eps}, seed, trial).front();
}

std::vector<FieldRealization> sample_field_family(const SpectralSynthesisPlan& plan,
                                                  const std::vector<double>& eps_list,
                                                  std::uint64_t seed, std::uint64_t trial) {
    for (double e : eps_list)
        if (!(e > 0) || plan.cutoff * e < 8.0 - 1e-12)
            throw DomainError("field family: cutoff does not resolve eps = " + std::to_string(e));
    return synthesize(plan, eps_list, seed, trial);
}

transforms::SampledFunction gmc_density(const FieldRealization& field, double gamma) {
    if (!(gamma > 0) || gamma >= std::sqrt(2.0))
        throw DomainError("gmc_density: gamma must lie in (0, sqrt 2)");
    if (field.values.empty()) throw DomainError("gmc_density: empty realization");
    std::vector<double> d(field.values.size());
    const double shift = 0.5 * gamma * gamma * field.variance;
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = std::exp(gamma * field.values[i] - shift);
    return transforms::SampledFunction::from_real(field.grid.start, field.grid.step, std::move(d));
}

double Weight::operator()(double u) const {
    if (u < a || u > b) return 0.0;
    return f ? f(u) : 1.0;
}

double Weight::integral() const {
    if (!f) return b - a;
    return composite_gauss_legendre(std::vector<double>{a, b}, 24, (b - a) / 16).integrate(f);
}

double mass(const transforms::SampledFunction& density, const Weight& w) {
    density.validate();
    const double x0 = density.start, h = density.step;
    const double x1 = density.x(density.size() - 1);
    if (w.a < x0 - 1e-12 * h || w.b > x1 + 1e-12 * h)
        throw DomainError("mass: weight support [" + std::to_string(w.a) + ", " + std::to_string(w.b) +
                          "] escapes the grid");
    auto value_at = [&](double x) {
        double s = std::clamp((x - x0) / h, 0.0, static_cast<double>(density.size() - 1));
        auto i = std::min(static_cast<std::size_t>(s), density.size() - 2);
        double t = s - static_cast<double>(i);
        return (1 - t) * density.values[i].real() + t * density.values[i + 1].real();
    };
    auto wv = [&](double u) { return w.f ? w.f(u) : 1.0; };
    double total = 0.0;
    auto first = static_cast<std::size_t>(std::max(0.0, std::floor((w.a - x0) / h)));
    for (std::size_t i = first; i + 1 < density.size(); ++i) {
        double lo = std::max(density.x(i), w.a), hi = std::min(density.x(i + 1), w.b);
        if (hi <= lo) {
            if (density.x(i) >= w.b) break;
            continue;
        }
        total += 0.5 * (hi - lo) * (value_at(lo) * wv(lo) + value_at(hi) * wv(hi));
    }
    return total;
}

namespace {

// Stationary covariance T(d), d >= 0, either closed form (eps = 0) or t_exact.
struct StationaryKernel {
    double eps;
    Mollifier phi;
    KernelParams kernel;
    // optional interpolation table for repeated evaluation
    double table_step = 0.0;
    std::vector<double> table;

    double direct(double d) const {
        d = std::abs(d);
        if (eps == 0.0) {
            if (d == 0.0) return std::numeric_limits<double>::infinity();
            if (d == kernel.ell) return -std::numeric_limits<double>::infinity();
            return covariance::q_kernel(d, kernel);
        }
        return covariance::t_exact(d, 0.0, eps, eps, phi, phi, kernel).value;
    }

    void tabulate(double dmax) {
        if (eps == 0.0) return;
        table_step = std::min(eps / 40.0, dmax / 400.0);
        auto n = static_cast<std::size_t>(std::ceil(dmax / table_step)) + 3;
        table.resize(n + 1);
        for (std::size_t i = 0; i <= n; ++i) table[i] = direct(static_cast<double>(i) * table_step);
    }

    double operator()(double d) const {
        d = std::abs(d);
        if (table.empty()) return direct(d);
        double s = d / table_step;
        auto i = static_cast<std::size_t>(s);
        if (i + 2 >= table.size()) return direct(d);
        double t = s - static_cast<double>(i);
        // Catmull-Rom, mirrored at d = 0 where T is even
        double p0 = i == 0 ? table[1] : table[i - 1], p1 = table[i], p2 = table[i + 1], p3 = table[i + 2];
        return p1 + 0.5 * t * (p2 - p0 + t * (2 * p0 - 5 * p1 + 4 * p2 - p3 + t * (3 * (p1 - p2) + p3 - p0)));
    }
};

// Nodes on [lo, hi] graded toward every listed singular point lying in [lo, hi].
QuadratureRule singular_rule(double lo, double hi, std::vector<double> points, int m, int levels,
                             double ratio) {
    std::vector<double> cuts{lo, hi};
    for (double p : points)
        if (p > lo && p < hi) cuts.push_back(p);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    auto is_singular = [&](double x) {
        return std::any_of(points.begin(), points.end(), [&](double p) { return std::abs(p - x) < 1e-15; });
    };
    QuadratureRule out;
    out.order = m;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double a = cuts[i], b = cuts[i + 1];
        bool sa = is_singular(a), sb = is_singular(b);
        QuadratureRule part;
        if (sa && sb) part = graded_gauss_legendre_both(a, b, m, levels, ratio);
        else if (sa) part = graded_gauss_legendre(a, b, m, levels, ratio);
        else if (sb) {
            part = graded_gauss_legendre(a, b, m, levels, ratio);
            for (auto& x : part.nodes) x = a + b - x;  // mirror toward b
        } else part = composite_gauss_legendre(std::vector<double>{a, b}, m, (b - a) / 2);
        out.nodes.insert(out.nodes.end(), part.nodes.begin(), part.nodes.end());
        out.weights.insert(out.weights.end(), part.weights.begin(), part.weights.end());
    }
    return out;
}

int grading_levels(double eps, double width, double ratio) {
    if (eps == 0.0) return 40;
    double target = std::max(eps * 1e-4, 1e-300) / width;
    return std::clamp(static_cast<int>(std::ceil(std::log(target) / std::log(ratio))), 4, 40);
}

// int int w(u) w(v) exp(g2 T(u - v)) du dv = 2 int_0^D R(d) exp(g2 T(d)) dd + diagonal-free.
double moment_q2(double g2, const Weight& w, const StationaryKernel& T, int m) {
    const double D = w.b - w.a;
    auto autocorr = [&](double d) {
        if (!w.f) return std::max(0.0, D - d);
        if (d >= D) return 0.0;
        auto r = composite_gauss_legendre(std::vector<double>{w.a, w.b - d}, 16, (D - d) / 8);
        return r.integrate([&](double u) { return w.f(u) * w.f(u + d); });
    };
    std::vector<double> sing{0.0};
    if (T.kernel.ell < D) sing.push_back(T.kernel.ell);
    const double ratio = 0.15;
    auto rule = singular_rule(0.0, D, sing, m, grading_levels(T.eps, D, ratio), ratio);
    double s = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
        double d = rule.nodes[i];
        s += rule.weights[i] * autocorr(d) * std::exp(g2 * T(d));
    }
    return 2.0 * s;
}

double moment_q3(double g2, const Weight& w, const StationaryKernel& T, int m, int levels) {
    const double ell = T.kernel.ell, ratio = 0.2;
    auto outer = singular_rule(w.a, w.b, {w.a, w.b}, m, levels, ratio);
    double s = 0.0;
    for (std::size_t i = 0; i < outer.size(); ++i) {
        double u1 = outer.nodes[i], w1 = outer.weights[i] * w(u1);
        if (w1 == 0.0) continue;
        auto mid = singular_rule(w.a, w.b, {u1, u1 - ell, u1 + ell}, m, levels, ratio);
        for (std::size_t j = 0; j < mid.size(); ++j) {
            double u2 = mid.nodes[j], w2 = mid.weights[j] * w(u2);
            if (w2 == 0.0) continue;
            double t12 = T(u1 - u2);
            auto inner = singular_rule(w.a, w.b, {u1, u2, u1 - ell, u1 + ell, u2 - ell, u2 + ell}, m,
                                       levels, ratio);
            double part = 0.0;
            for (std::size_t k = 0; k < inner.size(); ++k) {
                double u3 = inner.nodes[k];
                part += inner.weights[k] * w(u3) * std::exp(g2 * (t12 + T(u1 - u3) + T(u2 - u3)));
            }
            s += w1 * w2 * part;
        }
    }
    return s;
}

Estimate moment_qmc(int q, double g2, const Weight& w, const StationaryKernel& T) {
    if (q > 16) throw DomainError("exact_gaussian_moment: q > 16 not supported");
    const double D = w.b - w.a;
    std::vector<double> u(q);
    auto f = [&](std::span<const double> z) {
        double weight = 1.0;
        for (int k = 0; k < q; ++k) {
            u[k] = w.a + D * z[k];
            weight *= w(u[k]) * D;
        }
        if (weight == 0.0) return 0.0;
        double e = 0.0;
        for (int j = 0; j < q; ++j)
            for (int k = j + 1; k < q; ++k) e += T(u[j] - u[k]);
        return weight * std::exp(g2 * e);
    };
    return randomized_kronecker(f, q, std::size_t{1} << 14, 16, 0x5eed);
}

}  // namespace

Estimate exact_gaussian_moment(int q, double gamma, const Weight& w, double eps,
                               const Mollifier& phi, const KernelParams& kernel) {
    kernel.validate();
    if (q < 1) throw DomainError("exact_gaussian_moment: q must be positive");
    if (!(w.b > w.a)) throw DomainError("exact_gaussian_moment: empty weight support");
    if (eps < 0) throw DomainError("exact_gaussian_moment: eps must be non-negative");
    const double g2 = gamma * gamma;
    if (eps == 0.0 && g2 * q >= 2.0 && q > 1)
        throw DivergenceError("exact_gaussian_moment: gamma^2 q >= 2 diverges without regularization");
    const double total = w.integral();
    if (q == 1) return {total, 0.0};
    if (g2 == 0.0) return {std::pow(total, q), 0.0};

    StationaryKernel T{eps, phi, kernel, 0.0, {}};
    if (q == 2) {
        double fine = moment_q2(g2, w, T, 14);
        double coarse = moment_q2(g2, w, T, 9);
        return {fine, std::abs(fine - coarse)};
    }
    T.tabulate(w.b - w.a);
    if (q == 3) {
        double fine = moment_q3(g2, w, T, 6, 10);
        double coarse = moment_q3(g2, w, T, 5, 8);
        return {fine, std::abs(fine - coarse)};
    }
    return moment_qmc(q, g2, w, T);
}

double thick_point_fraction(const std::vector<FieldRealization>& family, double gamma, double alpha,
                            int L, const Weight& w) {
    if (family.empty()) throw DomainError("thick_point_fraction: empty field family");
    if (L < 1) throw DomainError("thick_point_fraction: L must be positive");
    const auto& finest = family.back();
    auto density = gmc_density(finest, gamma);
    const std::size_t n = finest.values.size();
    for (std::size_t i = 0; i < n; ++i) {
        bool bad = false;
        for (std::size_t k = static_cast<std::size_t>(L); k <= family.size() && !bad; ++k)
            bad = family[k - 1].values[i] > alpha * static_cast<double>(k);
        if (!bad) density.values[i] = 0.0;
    }
    return mass(density, w);
}

}  // namespace mesochaos::field
