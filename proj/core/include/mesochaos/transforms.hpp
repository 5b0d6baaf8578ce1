#pragma once

#include <functional>
#include <vector>

#include "mesochaos/common.hpp"
#include "mesochaos/fft.hpp"

namespace mesochaos::transforms {

// Samples f(start + i*step), i < values.size(). The length is a power of two.
struct SampledFunction {
    double start = 0.0;
    double step = 1.0;
    std::vector<cplx> values;
    bool real = true;

    std::size_t size() const { return values.size(); }
    double x(std::size_t i) const { return start + static_cast<double>(i) * step; }
    double end() const { return x(size() - 1); }
    std::vector<double> real_values() const;
    void validate() const;

    // Zero-pads on the right up to the next power of two.
    static SampledFunction from_real(double start, double step, std::vector<double> values);
    static SampledFunction from_complex(double start, double step, std::vector<cplx> values);
    // n samples of f on [start, start + (n-1) step], n rounded up to a power of two.
    static SampledFunction sample(const std::function<double(double)>& f, double start,
                                  double step, std::size_t n);
};

// Trapezoidal int e^{-2 pi i kappa x} f(x) dx on the dual grid
// kappa_k = (k - M/2)/(M step), k = 0..M-1.
SampledFunction fourier(const SampledFunction& f);

// Multiplier -i sgn(kappa) applied after 4x zero padding, sgn(0) = 0, with the periodic-kernel
// remainder subtracted so the result is the transform on the line. Output on the input grid.
SampledFunction hilbert(const SampledFunction& f);

enum class Side { plus, minus };

// Boundary values C(f)_{+-} = +-f/2 + (i/2) H(f) of the Cauchy transform.
SampledFunction cauchy_boundary(const SampledFunction& f, Side side);

enum class InnerMethod { spectral, double_integral, hilbert_pairing };

// H^{1/2} pairing int |kappa| f^(kappa) g^(-kappa) d kappa. `error` carries the
// truncation-tail estimate (spectral: mass in the top half of the band; double integral:
// boundary leakage; hilbert pairing: boundary leakage of f').
Estimate h_half_inner(const SampledFunction& f, const SampledFunction& g, InnerMethod method);

// Fourth-order central differences, one-sided near the ends.
std::vector<double> derivative(const std::vector<double>& v, double step);

}  // namespace mesochaos::transforms
