#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "mesochaos/common.hpp"
#include "mesochaos/covariance.hpp"
#include "mesochaos/mollifier.hpp"
#include "mesochaos/transforms.hpp"

namespace mesochaos::field {

struct Grid {
    double start = 0.0;
    double step = 1.0;
    std::size_t count = 0;
    double x(std::size_t i) const { return start + static_cast<double>(i) * step; }
    double end() const { return x(count - 1); }
};

struct PlanOptions {
    double dk = 1.0 / 64.0;      // upper bound; shrunk to respect the periodization guard
    double max_step = 0.0;       // spatial step bound, default eps/8
    double cutoff_factor = 8.0;  // K eps >= cutoff_factor
    double cutoff = 0.0;         // explicit K, required when eps = 0
};

// Discretized spectral representation G(u) = 2 Re int_0^inf sin(pi ell k)/sqrt(k) e^{-2 pi i k u} dB(k),
// mollified by phi^(eps k). Frequencies k_j = j dk, 1 <= j <= K/dk, folded onto an FFT of size
// fft_size with grid.step * dk * fft_size = 1.
struct SpectralSynthesisPlan {
    double cutoff = 0.0;
    double dk = 0.0;
    Grid grid;
    Mollifier mollifier = Mollifier::gaussian();
    double eps = 0.0;
    bool unregularized = false;
    covariance::KernelParams kernel;
    std::size_t fft_size = 0;
    std::shared_ptr<const std::vector<double>> amplitudes;  // amplitude(j), j <= frequency_count(), set by make

    static SpectralSynthesisPlan make(double window_start, double window_end, double eps,
                                      const Mollifier& phi, const covariance::KernelParams& kernel,
                                      const PlanOptions& opts = {});
    void validate() const;

    std::size_t frequency_count() const;
    double amplitude(std::size_t j, double eps_override = -1.0) const;  // j >= 1
    // Population covariance of the synthesized field at lag d, and its variance.
    double covariance(double d) const;
    double variance() const;
    // Endpoint term dk^2 f'(0)/12 = (pi ell dk)^2/6 missing from the frequency sum at k = 0,
    // added to every sample as one constant Gaussian mode.
    double low_frequency_variance() const;
    // 2 int_K^inf phi^(eps k)^2 Q^(k) dk: variance lost to the cutoff.
    double cutoff_error() const;
};

struct FieldRealization {
    Grid grid;
    std::vector<double> values;  // G_{phi,eps}(x_i)
    double variance = 0.0;       // E G(x)^2 of the synthesized field (stationary)
    double eps = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t trial = 0;
};

FieldRealization sample_field(const SpectralSynthesisPlan& plan, std::uint64_t seed,
                              std::uint64_t trial = 0);

// One white-noise draw shared by every scale in `eps_list` (coupled regularizations).
// The plan's cutoff must resolve the smallest scale.
std::vector<FieldRealization> sample_field_family(const SpectralSynthesisPlan& plan,
                                                  const std::vector<double>& eps_list,
                                                  std::uint64_t seed, std::uint64_t trial = 0);

// exp(gamma G - gamma^2/2 Var) on the realization grid.
transforms::SampledFunction gmc_density(const FieldRealization& field, double gamma);

// Weight w(u) supported on [a, b]; f empty means the indicator of [a, b].
struct Weight {
    double a = 0.0;
    double b = 1.0;
    std::function<double(double)> f;
    double operator()(double u) const;
    double integral() const;
};

// Trapezoidal int density * w over [w.a, w.b] (linear interpolation in partial cells).
double mass(const transforms::SampledFunction& density, const Weight& w);

// q-th moment of the chaos mass, int exp(gamma^2 sum_{j<k} T(u_j,u_k)) prod w(u_k) du,
// with T = Q (eps = 0) or T_{eps,eps} (eps > 0).
Estimate exact_gaussian_moment(int q, double gamma, const Weight& w, double eps,
                               const Mollifier& phi = Mollifier::gaussian(),
                               const covariance::KernelParams& kernel = {});

// Chaos mass (finest scale density) of points where G_{eps_k}(u) > alpha k for some k >= L.
// family[k-1] is the field at eps_k = e^{-k}.
double thick_point_fraction(const std::vector<FieldRealization>& family, double gamma,
                            double alpha, int L, const Weight& w);

}  // namespace mesochaos::field
