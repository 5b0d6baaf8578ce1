#pragma once

#include <functional>
#include <span>
#include <cstdint>
#include <vector>

#include "mesochaos/common.hpp"

namespace mesochaos {

// Nodes and weights of a (possibly composite) Gauss-Legendre rule on a finite interval.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    int order = 0;  // nodes per panel

    std::size_t size() const { return nodes.size(); }
    double integrate(const std::function<double(double)>& f) const;
    double total_weight() const;
};

// Reference rule on [-1, 1], cached per order. Thread safe.
const QuadratureRule& gauss_legendre(int m);

QuadratureRule gauss_legendre_rule(int m, double a, double b);

// One m-point panel per consecutive pair of breakpoints.
QuadratureRule composite_gauss_legendre(std::span<const double> breaks, int m);

// Panels of width at most h between consecutive breakpoints.
QuadratureRule composite_gauss_legendre(std::span<const double> breaks, int m, double h);

// Geometric mesh refined toward `a` (ratio^k (b-a) panel edges), for integrable endpoint
// singularities such as |x-a|^{-s} or log|x-a|.
QuadratureRule graded_gauss_legendre(double a, double b, int m, int levels = 40,
                                     double ratio = 0.15);

// Same, refined toward both endpoints.
QuadratureRule graded_gauss_legendre_both(double a, double b, int m, int levels = 40,
                                          double ratio = 0.15);

// Panel-wise integration of an oscillatory integrand, panels of width h.
double integrate_panels(const std::function<double(double)>& f, double a, double b, double h,
                        int m = 16);

// Randomly shifted Kronecker (Richtmyer) lattice rule on [0,1]^dim, dim <= 16; the spread of
// the replicate means gives the error.
Estimate randomized_kronecker(const std::function<double(std::span<const double>)>& f, int dim,
                              std::size_t points, int replicates, std::uint64_t seed);

}  // namespace mesochaos
