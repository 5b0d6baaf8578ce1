#include "mesochaos/mollifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <vector>

#include "mesochaos/common.hpp"
#include "mesochaos/quadrature.hpp"
#include "mesochaos/transforms.hpp"

namespace mesochaos {

namespace {

double bump_raw(double x) {
    double d = 1.0 - x * x;
    return d > 0 ? std::exp(-1.0 / d) : 0.0;
}

// Cubic Hermite interpolation on a uniform table with known derivatives.
double hermite(const std::vector<double>& v, const std::vector<double>& dv, double x0, double h,
               double x) {
    double s = (x - x0) / h;
    auto i = static_cast<std::size_t>(std::floor(s));
    if (i + 1 >= v.size()) return v.back();
    double t = s - static_cast<double>(i);
    double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * v[i] + (t3 - 2 * t2 + t) * h * dv[i] +
           (-2 * t3 + 3 * t2) * v[i + 1] + (t3 - t2) * h * dv[i + 1];
}

}  // namespace

struct Mollifier::BumpTables {
    double norm = 1.0;
    // cdf on [-1, 1]
    double cdf_step = 0.0;
    std::vector<double> cdf, pdf;
    // fourier transform on [0, kmax]
    double ft_step = 0.0;
    std::vector<double> ft, dft;

    BumpTables() {
        auto rule = graded_gauss_legendre_both(-1.0, 1.0, 20, 6, 0.3);
        norm = rule.integrate(bump_raw);

        const int n = 4096;
        cdf_step = 2.0 / n;
        cdf.resize(n + 1);
        pdf.resize(n + 1);
        const auto& ref = gauss_legendre(16);
        double acc = 0.0;
        for (int i = 0; i <= n; ++i) {
            double x = -1.0 + i * cdf_step;
            if (i > 0) {
                double a = x - cdf_step, c = a + 0.5 * cdf_step, part = 0.0;
                for (std::size_t k = 0; k < ref.size(); ++k)
                    part += ref.weights[k] * bump_raw(c + 0.5 * cdf_step * ref.nodes[k]);
                acc += 0.5 * cdf_step * part / norm;
            }
            cdf[i] = acc;
            pdf[i] = bump_raw(x) / norm;
        }

        // phi^ and its derivative -2 pi i x phi^ sampled by one FFT each
        const double dx = 1.0 / 256.0;
        const std::size_t m = 1 << 17;
        const double start = -static_cast<double>(m / 2) * dx;
        std::vector<double> f(m), xf(m);
        for (std::size_t i = 0; i < m; ++i) {
            double x = start + static_cast<double>(i) * dx;
            f[i] = bump_raw(x) / norm;
            xf[i] = x * f[i];
        }
        auto fh = transforms::fourier(transforms::SampledFunction::from_real(start, dx, f));
        auto xfh = transforms::fourier(transforms::SampledFunction::from_real(start, dx, xf));
        ft_step = fh.step;
        const std::size_t zero = m / 2;
        const std::size_t count = m / 2;
        ft.resize(count);
        dft.resize(count);
        for (std::size_t k = 0; k < count; ++k) {
            ft[k] = fh.values[zero + k].real();
            // d/dkappa int e^{-2 pi i kappa x} phi = -2 pi i int x e^{...} phi
            dft[k] = (cplx(0, -kTwoPi) * xfh.values[zero + k]).real();
        }
    }
};

Mollifier::Mollifier(MollifierKind k) : kind_(k) {
    if (k == MollifierKind::smooth_bump) {
        static std::once_flag once;
        static std::shared_ptr<const BumpTables> tables;
        std::call_once(once, [] { tables = std::make_shared<const BumpTables>(); });
        bump_ = tables;
    }
}

Mollifier Mollifier::gaussian() { return Mollifier(MollifierKind::gaussian); }
Mollifier Mollifier::cauchy_like() { return Mollifier(MollifierKind::cauchy_like); }
Mollifier Mollifier::smooth_bump() { return Mollifier(MollifierKind::smooth_bump); }

Mollifier Mollifier::from_name(std::string_view name) {
    if (name == "gaussian") return gaussian();
    if (name == "cauchy_like" || name == "cauchy") return cauchy_like();
    if (name == "smooth_bump" || name == "bump") return smooth_bump();
    throw DomainError("unknown mollifier '" + std::string(name) + "'");
}

std::string Mollifier::name() const {
    switch (kind_) {
        case MollifierKind::gaussian: return "gaussian";
        case MollifierKind::cauchy_like: return "cauchy_like";
        case MollifierKind::smooth_bump: return "smooth_bump";
    }
    return "?";
}

double Mollifier::density(double x) const {
    switch (kind_) {
        case MollifierKind::gaussian: return std::exp(-0.5 * x * x) / std::sqrt(kTwoPi);
        case MollifierKind::cauchy_like: return 1.0 / (kPi * (1.0 + x * x));
        case MollifierKind::smooth_bump: return bump_raw(x) / bump_->norm;
    }
    return 0.0;
}

double Mollifier::cdf(double x) const {
    switch (kind_) {
        case MollifierKind::gaussian: return 0.5 * std::erfc(-x / std::sqrt(2.0));
        case MollifierKind::cauchy_like:
            // written to keep relative accuracy in the far left tail
            return x < 0 ? std::atan(-1.0 / x) / kPi : 0.5 + std::atan(x) / kPi;
        case MollifierKind::smooth_bump: {
            if (x <= -1.0) return 0.0;
            if (x >= 1.0) return 1.0;
            if (x > 0) return 1.0 - cdf(-x);
            return hermite(bump_->cdf, bump_->pdf, -1.0, bump_->cdf_step, x);
        }
    }
    return 0.0;
}

double Mollifier::fourier(double kappa) const {
    const double k = std::abs(kappa);
    switch (kind_) {
        case MollifierKind::gaussian: return std::exp(-2.0 * kPi * kPi * k * k);
        case MollifierKind::cauchy_like: return std::exp(-kTwoPi * k);
        case MollifierKind::smooth_bump: {
            double kmax = bump_->ft_step * static_cast<double>(bump_->ft.size() - 1);
            if (k >= kmax) return 0.0;
            return hermite(bump_->ft, bump_->dft, 0.0, bump_->ft_step, k);
        }
    }
    return 0.0;
}

double Mollifier::moment_order() const {
    switch (kind_) {
        case MollifierKind::gaussian: return 2.0;
        case MollifierKind::cauchy_like: return 0.5;
        case MollifierKind::smooth_bump: return 2.0;
    }
    return 0.0;
}

std::optional<double> Mollifier::strip_half_width() const {
    switch (kind_) {
        case MollifierKind::gaussian: return std::numeric_limits<double>::infinity();
        case MollifierKind::cauchy_like: return 1.0;
        case MollifierKind::smooth_bump: return std::nullopt;
    }
    return std::nullopt;
}

double Mollifier::frequency_cutoff(double tol) const {
    tol = std::max(tol, 1e-300);
    switch (kind_) {
        case MollifierKind::gaussian: return std::sqrt(std::log(1.0 / tol) / (2.0 * kPi * kPi));
        case MollifierKind::cauchy_like: return std::log(1.0 / tol) / kTwoPi;
        case MollifierKind::smooth_bump: {
            const auto& ft = bump_->ft;
            for (std::size_t k = ft.size(); k-- > 0;)
                if (std::abs(ft[k]) > tol) return static_cast<double>(k + 1) * bump_->ft_step;
            return 0.0;
        }
    }
    return 0.0;
}

double Mollifier::tail_radius(double tol) const {
    tol = std::max(tol, 1e-300);
    switch (kind_) {
        case MollifierKind::gaussian: {
            double r = 1.0;
            while (std::erfc(r / std::sqrt(2.0)) > tol) r += 0.25;
            return r;
        }
        case MollifierKind::cauchy_like: return 2.0 / (kPi * tol);
        case MollifierKind::smooth_bump: return 1.0;
    }
    return 0.0;
}

}  // namespace mesochaos
