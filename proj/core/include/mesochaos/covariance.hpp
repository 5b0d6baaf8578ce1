#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "mesochaos/common.hpp"
#include "mesochaos/mollifier.hpp"

namespace mesochaos::covariance {

// chi_u(x) = pi 1{|x - u| <= ell/2}
struct KernelParams {
    double ell = 1.0;
    void validate() const;
};

// Q(x) = -log|x| + (1/2) log|ell^2 - x^2|; throws DomainError at 0 and +-ell.
double q_kernel(double x, const KernelParams& p = {});

// Q_eps(x) = -log(eps/2pi v |x|) + log(eps/2pi v sqrt|ell^2 - x^2|)
double q_eps(double x, double eps, const KernelParams& p = {});

// Q^(kappa) = sin^2(pi ell kappa)/|kappa|, continuous extension 0 at kappa = 0.
double q_hat(double kappa, const KernelParams& p = {});

// chi_u^(kappa) = e^{-2 pi i u kappa} sin(pi ell kappa)/kappa, pi ell at kappa = 0.
std::complex<double> indicator_hat(double kappa, double u, const KernelParams& p = {});

// (chi_u * phi_eps)(x)
double smoothed_indicator(double x, double u, double eps, const Mollifier& phi,
                          const KernelParams& p = {});

// A frequency profile Phi with Phi(0) = 1, negligible beyond `cutoff`.
struct FrequencyProfile {
    std::function<double(double)> value;
    double cutoff = 0.0;  // 0 means: locate it automatically
};

// E_Phi(omega) = int_0^inf (1 - cos(omega k)) (Phi(k) - 1{k <= 1})/k dk.
Estimate cin_error_term(double omega, const FrequencyProfile& profile);

// lim_{omega -> inf} E_Phi(omega) = int_0^inf (Phi(k) - 1{k <= 1})/k dk
double cin_error_limit(const FrequencyProfile& profile);

// T_{eps,delta}(u,v) = int e^{-2 pi i (u-v) k} phi^(eps k) psi^(delta k) Q^(k) dk, evaluated through
// the Cin decomposition. `error` is the difference against a lower-order panel rule.
Estimate t_exact(double u, double v, double eps, double delta, const Mollifier& phi,
                 const Mollifier& psi, const KernelParams& p = {});

// Same integral by direct panel quadrature in kappa; slow, kept as a cross-check.
double t_bruteforce(double u, double v, double eps, double delta, const Mollifier& phi,
                    const Mollifier& psi, const KernelParams& p = {});

}  // namespace mesochaos::covariance

namespace mesochaos::covariance {

struct SuiteOptions {
    double extent = 2.0;                            // u, v in [-extent, extent]
    double step = 0.5;                              // lattice spacing
    std::vector<double> scales{1e-1, 1e-2, 1e-3};   // eps and delta values
    std::vector<double> separations{0.25, 0.5, 0.75, 1.5};
    std::vector<double> halving_scales{0.02, 0.01, 0.005};
};

struct OffDiagonalRow {
    double separation = 0.0;
    double eps = 0.0;
    double discrepancy = 0.0;  // |T_{eps,eps}(x, 0) - Q(x)|
    double ratio = 0.0;        // discrepancy(eps) / discrepancy(2 eps), NaN for the coarsest eps
};

struct NearDiagonalRow {
    double eps = 0.0;
    double delta = 0.0;
    double separation = 0.0;
    double offset = 0.0;  // T - log(1/delta)
};

struct SuiteReport {
    double domination_constant = 0.0;  // max over the lattice of T - log+(min(1/|u-v|, 1/eps, 1/delta))
    double q_eps_constant = 0.0;       // max of |T - Q_{eps v delta}(u - v)| away from u - v = +-ell
    double edge_gap = 0.0;             // same at u - v = +-ell, where it grows like log(1/eps)/2
    std::size_t lattice_points = 0;
    std::vector<OffDiagonalRow> off_diagonal;
    std::vector<NearDiagonalRow> near_diagonal;
    double band_width() const;          // spread of the near-diagonal offsets
    double worst_halving_ratio() const;  // largest discrepancy ratio
};

// Domination, pointwise convergence and near-diagonal log behaviour of T on a lattice.
SuiteReport assumption_suite(const Mollifier& phi, const KernelParams& p = {}, const SuiteOptions& opts = {});

}  // namespace mesochaos::covariance
