#include "mesochaos/transforms.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <boost/math/special_functions/bernoulli.hpp>
#include <boost/math/special_functions/factorials.hpp>

namespace mesochaos::transforms {

std::vector<double> SampledFunction::real_values() const {
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i].real();
    return out;
}

void SampledFunction::validate() const {
    if (values.empty()) throw DomainError("sampled function is empty");
    if (!(step > 0)) throw DomainError("sampled function: step must be positive");
    if (!is_power_of_two(values.size()))
        throw DomainError("sampled function: length must be a power of two");
}

SampledFunction SampledFunction::from_real(double start, double step, std::vector<double> v) {
    SampledFunction f;
    f.start = start;
    f.step = step;
    f.real = true;
    f.values.assign(next_power_of_two(std::max<std::size_t>(v.size(), 1)), cplx(0.0));
    for (std::size_t i = 0; i < v.size(); ++i) f.values[i] = v[i];
    if (v.empty()) f.values.clear();
    return f;
}

SampledFunction SampledFunction::from_complex(double start, double step, std::vector<cplx> v) {
    SampledFunction f;
    f.start = start;
    f.step = step;
    f.real = false;
    std::size_t n = v.size();
    f.values = std::move(v);
    if (n > 0) f.values.resize(next_power_of_two(n), cplx(0.0));
    return f;
}

SampledFunction SampledFunction::sample(const std::function<double(double)>& fn, double start,
                                        double step, std::size_t n) {
    std::vector<double> v(next_power_of_two(n));
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(start + static_cast<double>(i) * step);
    return from_real(start, step, std::move(v));
}

SampledFunction fourier(const SampledFunction& f) {
    f.validate();
    const std::size_t m = f.size();
    std::vector<cplx> data = f.values;
    fft_forward(data);
    SampledFunction out;
    out.step = 1.0 / (static_cast<double>(m) * f.step);
    out.start = -static_cast<double>(m / 2) * out.step;
    out.real = false;
    out.values.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
        std::size_t src = (k + m - m / 2) % m;
        double kappa = out.x(k);
        out.values[k] = f.step * std::polar(1.0, -kTwoPi * kappa * f.start) * data[src];
    }
    return out;
}

namespace {

// Zero-padded DFT of the (real part of the) samples, length 4M.
std::vector<cplx> padded_spectrum(const SampledFunction& f) {
    std::vector<cplx> data(4 * f.size(), cplx(0.0));
    std::copy(f.values.begin(), f.values.end(), data.begin());
    fft_forward(data);
    return data;
}

// Signed frequency index of DFT bin j for length n; the Nyquist bin maps to 0.
long signed_bin(std::size_t j, std::size_t n) {
    if (2 * j == n) return 0;
    return 2 * j < n ? static_cast<long>(j) : static_cast<long>(j) - static_cast<long>(n);
}

void require_same_grid(const SampledFunction& f, const SampledFunction& g) {
    if (f.size() != g.size() || std::abs(f.start - g.start) > 1e-12 * (1 + std::abs(f.start)) ||
        std::abs(f.step - g.step) > 1e-14 * f.step)
        throw DomainError("h_half_inner: f and g must share one grid");
}

// The padded FFT applies the periodic kernel (a/pi) cot(a y), a = pi/P. Adds the smooth remainder
// (1/pi) int f(t) [1/y - a cot(a y)] dt, y = x - t, through its odd Taylor series
// sum_k 2^{2k} |B_{2k}| a^{2k} y^{2k-1} / (2k)! and moments of f about the window center.
void add_period_correction(const SampledFunction& f, std::vector<double>& out) {
    constexpr int terms = 12;
    constexpr int order = 2 * terms - 1;
    const std::size_t m = f.size();
    const double a = kPi / (4.0 * static_cast<double>(m) * f.step);
    const double c = f.start + 0.5 * static_cast<double>(m - 1) * f.step;
    std::array<double, order + 1> mom{};
    for (std::size_t i = 0; i < m; ++i) {
        const double v = f.values[i].real() * f.step, d = f.x(i) - c;
        double p = 1.0;
        for (int j = 0; j <= order; ++j, p *= d) mom[j] += v * p;
    }
    std::array<double, terms> b{};
    for (int k = 1; k <= terms; ++k)
        b[k - 1] = std::ldexp(std::abs(boost::math::bernoulli_b2n<double>(k)), 2 * k) * std::pow(a, 2 * k) /
                   boost::math::factorial<double>(2 * k);
    // binomial coefficients up to `order`
    std::array<std::array<double, order + 1>, order + 1> binom{};
    for (int r = 0; r <= order; ++r) {
        binom[r][0] = 1.0;
        for (int j = 1; j <= r; ++j) binom[r][j] = binom[r - 1][j - 1] + (j < r ? binom[r - 1][j] : 0.0);
    }
    // coefficient of (x - c)^e in the correction
    std::array<double, order + 1> poly{};
    for (int k = 1; k <= terms; ++k) {
        const int r = 2 * k - 1;
        for (int j = 0; j <= r; ++j) poly[r - j] += b[k - 1] * binom[r][j] * (j % 2 ? -1.0 : 1.0) * mom[j];
    }
    for (std::size_t i = 0; i < m; ++i) {
        const double d = f.x(i) - c;
        double s = 0.0;
        for (int e = order; e >= 0; --e) s = s * d + poly[e];
        out[i] += s / kPi;
    }
}

std::vector<double> hilbert_real(const SampledFunction& f) {
    const std::size_t n = 4 * f.size();
    std::vector<cplx> data = padded_spectrum(f);
    for (std::size_t j = 0; j < n; ++j) {
        long s = signed_bin(j, n);
        data[j] *= s > 0 ? cplx(0, -1) : (s < 0 ? cplx(0, 1) : cplx(0));
    }
    fft_backward(data);
    std::vector<double> out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = data[i].real() / static_cast<double>(n);
    add_period_correction(f, out);
    return out;
}

bool looks_differentiable(const std::vector<double>& v) {
    double amp = 0.0, jump = 0.0;
    for (double x : v) amp = std::max(amp, std::abs(x));
    for (std::size_t i = 0; i + 1 < v.size(); ++i) jump = std::max(jump, std::abs(v[i + 1] - v[i]));
    return amp == 0.0 || jump <= 0.1 * amp;
}

Estimate inner_spectral(const SampledFunction& f, const SampledFunction& g) {
    const std::size_t n = 4 * f.size();
    std::vector<cplx> fh = padded_spectrum(f), gh = padded_spectrum(g);
    const double dk = 1.0 / (static_cast<double>(n) * f.step);
    const double dx2 = f.step * f.step;
    double sum = 0.0, tail = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        long s = signed_bin(j, n);
        double kappa = std::abs(static_cast<double>(s)) * dk;
        double term = kappa * (fh[j] * std::conj(gh[j])).real() * dx2 * dk;
        sum += term;
        if (2 * std::abs(s) > static_cast<long>(n / 2)) tail += std::abs(term);
    }
    // |kappa| has a kink at 0; Euler-Maclaurin endpoint terms of both half lines,
    // g(k) = k P(k): dk^2/12 g'(0) - dk^4/720 g'''(0) + dk^6/30240 g^(5)(0),
    // with dk^2 P'' and dk^4 P'''' from five-point differences.
    auto p = [&](std::size_t j) { return (fh[j] * std::conj(gh[j])).real() * dx2; };
    const double p0 = p(0), p1 = p(1) + p(n - 1), p2 = p(2) + p(n - 2);
    const double d2 = (16.0 * p1 - p2 - 30.0 * p0) / 12.0, d4 = p2 - 4.0 * p1 + 6.0 * p0;
    sum += dk * dk * (p0 / 6.0 - d2 / 120.0 + d4 / 3024.0);
    return {sum, tail};
}

Estimate inner_double_integral(const SampledFunction& f, const SampledFunction& g) {
    const std::size_t n = f.size();
    const double h = f.step;
    std::vector<double> fv = f.real_values(), gv = g.real_values();
    std::vector<double> fd = derivative(fv, h), gd = derivative(gv, h);
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) xs[i] = f.x(i);
    double inside = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        inside += fd[i] * gd[i];
        double row = 0.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            double d = xs[i] - xs[j];
            row += (fv[i] - fv[j]) * (gv[i] - gv[j]) / (d * d);
        }
        inside += 2.0 * row;
    }
    inside *= h * h;
    const double a = xs.front() - 0.5 * h, b = xs.back() + 0.5 * h;
    double outside = 0.0, leak = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double w = 1.0 / (xs[i] - a) + 1.0 / (b - xs[i]);
        outside += 2.0 * fv[i] * gv[i] * w * h;
    }
    leak = std::abs(fv.front() * gv.front()) + std::abs(fv.back() * gv.back());
    const double norm = 1.0 / (4.0 * kPi * kPi);
    return {(inside + outside) * norm, leak};
}

Estimate inner_hilbert_pairing(const SampledFunction& f, const SampledFunction& g) {
    std::vector<double> fv = f.real_values();
    if (!looks_differentiable(fv) || !looks_differentiable(g.real_values()))
        throw DomainError("hilbert_pairing: input is not resolved as a differentiable function");
    std::vector<double> fd = derivative(fv, f.step);
    std::vector<double> hg = hilbert_real(g);
    double s = 0.0;
    for (std::size_t i = 0; i < fd.size(); ++i) s += fd[i] * hg[i];
    s *= f.step;
    double leak = std::abs(fd.front()) + std::abs(fd.back());
    return {-s / kTwoPi, leak};
}

}  // namespace

SampledFunction hilbert(const SampledFunction& f) {
    f.validate();
    SampledFunction out;
    out.start = f.start;
    out.step = f.step;
    out.real = true;
    std::vector<double> h = hilbert_real(f);
    out.values.assign(h.begin(), h.end());
    return out;
}

SampledFunction cauchy_boundary(const SampledFunction& f, Side side) {
    SampledFunction h = hilbert(f);
    SampledFunction out = h;
    out.real = false;
    const double sign = side == Side::plus ? 1.0 : -1.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        out.values[i] = sign * 0.5 * f.values[i].real() + cplx(0.0, 0.5) * h.values[i].real();
    return out;
}

Estimate h_half_inner(const SampledFunction& f, const SampledFunction& g, InnerMethod method) {
    f.validate();
    g.validate();
    require_same_grid(f, g);
    switch (method) {
        case InnerMethod::spectral: return inner_spectral(f, g);
        case InnerMethod::double_integral: return inner_double_integral(f, g);
        case InnerMethod::hilbert_pairing: return inner_hilbert_pairing(f, g);
    }
    throw DomainError("h_half_inner: unknown method");
}

std::vector<double> derivative(const std::vector<double>& v, double h) {
    const std::size_t n = v.size();
    std::vector<double> d(n, 0.0);
    if (n < 5) {
        for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (v[i + 1] - v[i - 1]) / (2 * h);
        return d;
    }
    for (std::size_t i = 2; i + 2 < n; ++i)
        d[i] = (v[i - 2] - 8 * v[i - 1] + 8 * v[i + 1] - v[i + 2]) / (12 * h);
    d[0] = (-25 * v[0] + 48 * v[1] - 36 * v[2] + 16 * v[3] - 3 * v[4]) / (12 * h);
    d[1] = (-3 * v[0] - 10 * v[1] + 18 * v[2] - 6 * v[3] + v[4]) / (12 * h);
    d[n - 1] = -(-25 * v[n - 1] + 48 * v[n - 2] - 36 * v[n - 3] + 16 * v[n - 4] - 3 * v[n - 5]) / (12 * h);
    d[n - 2] = -(-3 * v[n - 1] - 10 * v[n - 2] + 18 * v[n - 3] - 6 * v[n - 4] + v[n - 5]) / (12 * h);
    return d;
}

}  // namespace mesochaos::transforms
