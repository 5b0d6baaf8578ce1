#include "mesochaos/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mesochaos/quadrature.hpp"
#include "mesochaos/specfun.hpp"

namespace mesochaos::covariance {

void KernelParams::validate() const {
    if (!(ell > 0)) throw DomainError("kernel parameter ell must be positive");
}

double q_kernel(double x, const KernelParams& p) {
    p.validate();
    const double ax = std::abs(x);
    if (ax == 0.0) throw DomainError("q_kernel: pole at 0 (value +inf)");
    if (ax == p.ell) throw DomainError("q_kernel: pole at +-ell (value -inf)");
    return -std::log(ax) + 0.5 * std::log(std::abs(p.ell * p.ell - x * x));
}

double q_eps(double x, double eps, const KernelParams& p) {
    p.validate();
    if (!(eps > 0)) throw DomainError("q_eps: eps must be positive");
    const double c = eps / kTwoPi;
    const double r = std::sqrt(std::abs(p.ell * p.ell - x * x));
    return -std::log(std::max(c, std::abs(x))) + std::log(std::max(c, r));
}

double q_hat(double kappa, const KernelParams& p) {
    if (kappa == 0.0) return 0.0;
    double s = std::sin(kPi * p.ell * kappa);
    return s * s / std::abs(kappa);
}

std::complex<double> indicator_hat(double kappa, double u, const KernelParams& p) {
    double amp = kappa == 0.0 ? kPi * p.ell : std::sin(kPi * p.ell * kappa) / kappa;
    return std::polar(amp, -kTwoPi * u * kappa);
}

double smoothed_indicator(double x, double u, double eps, const Mollifier& phi,
                          const KernelParams& p) {
    const double y = x - u, half = 0.5 * p.ell;
    // difference of tail masses, taken on whichever side keeps both small
    if (y >= 0) return kPi * (phi.cdf((half - y) / eps) - phi.cdf((-half - y) / eps));
    return kPi * (phi.cdf((y + half) / eps) - phi.cdf((y - half) / eps));
}

namespace {

double locate_cutoff(const FrequencyProfile& profile) {
    if (profile.cutoff > 0) return profile.cutoff;
    double k = 2.0;
    while (k < 1e7) {
        double worst = 0.0;
        for (int i = 0; i <= 64; ++i) worst = std::max(worst, std::abs(profile.value(k * (1.0 + i / 64.0))));
        if (worst < 1e-16) return k;
        k *= 2.0;
    }
    throw DivergenceError("cin_error_term: frequency profile does not decay; tail diverges");
}

// int_a^b (1 - cos(omega k)) g(k) dk on panels resolving the oscillation; returns the m-point
// value and the difference to a coarser rule on the same panels.
Estimate oscillatory_part(double omega, const std::function<double(double)>& g, double a,
                          double b) {
    if (b <= a) return {0.0, 0.0};
    double h = std::min(0.25, omega > 0 ? kTwoPi / omega : 0.25);
    int panels = std::max(1, static_cast<int>(std::ceil((b - a) / h)));
    double step = (b - a) / panels;
    const auto& fine = gauss_legendre(16);
    const auto& coarse = gauss_legendre(10);
    double sf = 0.0, sc = 0.0;
    for (int p = 0; p < panels; ++p) {
        double c = a + (p + 0.5) * step, hh = 0.5 * step;
        auto f = [&](double k) {
            double s = std::sin(0.5 * omega * k);
            return 2.0 * s * s * g(k);
        };
        double pf = 0.0, pc = 0.0;
        for (std::size_t i = 0; i < fine.size(); ++i) pf += fine.weights[i] * f(c + hh * fine.nodes[i]);
        for (std::size_t i = 0; i < coarse.size(); ++i) pc += coarse.weights[i] * f(c + hh * coarse.nodes[i]);
        sf += hh * pf;
        sc += hh * pc;
    }
    return {sf, std::abs(sf - sc)};
}

Estimate error_term(double omega, const std::function<double(double)>& phi_of_k, double cutoff) {
    omega = std::abs(omega);
    if (omega == 0.0) return {0.0, 0.0};
    auto below = [&](double k) { return (phi_of_k(k) - 1.0) / k; };
    auto above = [&](double k) { return phi_of_k(k) / k; };
    Estimate lo = oscillatory_part(omega, below, 0.0, 1.0);
    Estimate hi = oscillatory_part(omega, above, 1.0, std::max(1.0, cutoff));
    return {lo.value + hi.value, lo.error + hi.error};
}

}  // namespace

Estimate cin_error_term(double omega, const FrequencyProfile& profile) {
    return error_term(omega, profile.value, locate_cutoff(profile));
}

double cin_error_limit(const FrequencyProfile& profile) {
    double cutoff = locate_cutoff(profile);
    std::vector<double> lo{0.0, 0.25, 0.5, 0.75, 1.0};
    auto r1 = composite_gauss_legendre(lo, 20);
    double s = r1.integrate([&](double k) { return (profile.value(k) - 1.0) / k; });
    if (cutoff > 1.0) {
        std::vector<double> hi{1.0, cutoff};
        auto r2 = composite_gauss_legendre(hi, 20, 0.25);
        s += r2.integrate([&](double k) { return profile.value(k) / k; });
    }
    return s;
}

Estimate t_exact(double u, double v, double eps, double delta, const Mollifier& phi,
                 const Mollifier& psi, const KernelParams& p) {
    p.validate();
    if (!(eps > 0) || !(delta > 0)) throw DomainError("t_exact: eps and delta must be positive");
    const double s = std::max(eps, delta);
    const double re = eps / s, rd = delta / s;
    auto profile = [&](double k) { return phi.fourier(re * k) * psi.fourier(rd * k); };
    const double tol = 1e-17;
    const double cutoff = std::min(phi.frequency_cutoff(tol) / re, psi.frequency_cutoff(tol) / rd);

    auto j = [&](double big_omega) -> Estimate {
        double w = std::abs(big_omega) / s;
        if (w == 0.0) return {0.0, 0.0};
        Estimate e = error_term(w, profile, cutoff);
        return {specfun::cin(w) + e.value, e.error};
    };
    const double a = u - v;
    Estimate j0 = j(kTwoPi * a);
    Estimate jp = j(kTwoPi * (p.ell + a));
    Estimate jm = j(kTwoPi * (p.ell - a));
    double value = -j0.value + 0.5 * jp.value + 0.5 * jm.value;
    double err = j0.error + 0.5 * (jp.error + jm.error) + 1e-14 * (std::abs(j0.value) + std::abs(jp.value));
    if (err > 1e-6)
        throw ConvergenceError("t_exact: oscillatory quadrature did not converge", err);
    return {value, err};
}

double t_bruteforce(double u, double v, double eps, double delta, const Mollifier& phi,
                    const Mollifier& psi, const KernelParams& p) {
    const double tol = 1e-17;
    const double cutoff = std::min(phi.frequency_cutoff(tol) / eps, psi.frequency_cutoff(tol) / delta);
    const double a = u - v;
    const double h = 0.25 / (std::abs(a) + p.ell);
    auto f = [&](double k) {
        if (k == 0.0) return 0.0;
        return 2.0 * std::cos(kTwoPi * a * k) * phi.fourier(eps * k) * psi.fourier(delta * k) *
               q_hat(k, p);
    };
    return integrate_panels(f, 0.0, cutoff, h, 20);
}

}  // namespace mesochaos::covariance

namespace mesochaos::covariance {

double SuiteReport::band_width() const {
    if (near_diagonal.empty()) return 0.0;
    auto [lo, hi] = std::minmax_element(near_diagonal.begin(), near_diagonal.end(),
                                        [](const auto& a, const auto& b) { return a.offset < b.offset; });
    return hi->offset - lo->offset;
}

double SuiteReport::worst_halving_ratio() const {
    double w = 0.0;
    for (const auto& r : off_diagonal)
        if (std::isfinite(r.ratio)) w = std::max(w, r.ratio);
    return w;
}

SuiteReport assumption_suite(const Mollifier& phi, const KernelParams& p, const SuiteOptions& opts) {
    p.validate();
    if (!(opts.step > 0) || !(opts.extent > 0)) throw DomainError("assumption_suite: bad lattice");
    SuiteReport rep;
    rep.domination_constant = -std::numeric_limits<double>::infinity();
    const int n = static_cast<int>(std::floor(2.0 * opts.extent / opts.step + 1e-9));
    // T depends on u - v only; each lag is evaluated once.
    for (int k = -n; k <= n; ++k) {
        const double x = k * opts.step;
        for (double eps : opts.scales)
            for (double delta : opts.scales) {
                double t = t_exact(x, 0.0, eps, delta, phi, phi, p).value;
                double inv = std::min(1.0 / eps, 1.0 / delta);
                if (x != 0.0) inv = std::min(inv, 1.0 / std::abs(x));
                double bound = std::max(0.0, std::log(inv));
                rep.domination_constant = std::max(rep.domination_constant, t - bound);
                double gap = std::abs(t - q_eps(x, std::max(eps, delta), p));
                if (std::abs(std::abs(x) - p.ell) < 1e-12)
                    rep.edge_gap = std::max(rep.edge_gap, gap);
                else
                    rep.q_eps_constant = std::max(rep.q_eps_constant, gap);
                rep.lattice_points += static_cast<std::size_t>(n + 1 - std::abs(k));
            }
    }
    for (double x : opts.separations) {
        double previous = std::numeric_limits<double>::quiet_NaN();
        for (double eps : opts.halving_scales) {
            OffDiagonalRow r;
            r.separation = x;
            r.eps = eps;
            r.discrepancy = std::abs(t_exact(x, 0.0, eps, eps, phi, phi, p).value - q_kernel(x, p));
            r.ratio = r.discrepancy / previous;
            previous = r.discrepancy;
            rep.off_diagonal.push_back(r);
        }
    }
    for (double delta : opts.scales)
        for (double eps : opts.scales) {
            if (eps > delta) continue;
            for (double x : {0.0, 0.5 * std::exp(-1.0 / delta)}) {
                NearDiagonalRow r;
                r.eps = eps;
                r.delta = delta;
                r.separation = x;
                r.offset = t_exact(x, 0.0, eps, delta, phi, phi, p).value - std::log(1.0 / delta);
                rep.near_diagonal.push_back(r);
            }
        }
    return rep;
}

}  // namespace mesochaos::covariance
