#pragma once

#include "mesochaos/common.hpp"

namespace mesochaos::specfun {

constexpr double kEulerGamma = 0.57721566490153286060651209;
// zeta'(-1), enters the constant term of the Barnes G asymptotic expansion
constexpr double kZetaPrimeMinusOne = -0.16542114370045092921391966024278;

double log_gamma(double x);  // x > 0
double gamma(double x);

// Cin(x) = int_0^x (1 - cos t)/t dt, entire and even.
double cin(double x);
// Ci(x) = -int_x^inf cos t / t dt, extended evenly; throws DomainError at 0.
double ci(double x);

double log_barnes_g(double z);  // z > 0
double barnes_g(double z);

// C_{gamma,q} = G(1 + gamma/sqrt2)^{2q} / G(1 + gamma sqrt2)^q.
LogValue fyodorov_keating_constant(double gamma, int q);

// int_{[0,1]^n} prod_{i != j} |u_i - u_j|^{-gt} du, finite iff n*gt < 1.
LogValue selberg_unit(int n, double gt);

// int_{[0,r]^q} |Delta(u)|^{-gamma^2} du = r^{xi(q)} S(q; gamma^2/2).
LogValue selberg_interval_moment(int q, double gamma, double r);

// int_{[0,2pi]^q} prod_{j<k} |e^{i theta_j} - e^{i theta_k}|^{-gamma^2} d theta.
LogValue dyson_circle(int q, double gamma);

// Numerical evaluations of the same integrals: graded Gauss-Legendre after reduction to one
// lag variable for q <= 2, randomized Kronecker lattices for q = 3 (error = replicate spread).
Estimate selberg_interval_quadrature(int q, double gamma, double r);
Estimate dyson_circle_quadrature(int q, double gamma);

// xi(q) = q - gamma^2 q (q-1)/2
double structure_exponent(int q, double gamma);

}  // namespace mesochaos::specfun
