#include "mesochaos/cue.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Dense>

#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "mesochaos/covariance.hpp"
#include "mesochaos/fft.hpp"
#include "mesochaos/quadrature.hpp"
#include "mesochaos/rng.hpp"

namespace mesochaos::cue {

EigenangleSample sample_cue(int N, std::uint64_t seed, std::uint64_t trial) {
    if (N < 1) throw DomainError("sample_cue: N must be positive");
    Stream rng(seed, trial, 0xc0e);
    const double r = std::sqrt(0.5);
    for (int attempt = 0; attempt < 8; ++attempt) {
        Eigen::MatrixXcd z(N, N);
        for (int j = 0; j < N; ++j)
            for (int i = 0; i < N; ++i) {
                double re = rng.normal(), im = rng.normal();
                z(i, j) = cplx(r * re, r * im);
            }
        Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
        const auto& packed = qr.matrixQR();
        double dmin = std::abs(packed(0, 0)), dmax = dmin;
        for (int i = 1; i < N; ++i) {
            dmin = std::min(dmin, std::abs(packed(i, i)));
            dmax = std::max(dmax, std::abs(packed(i, i)));
        }
        if (dmin < 1e-12 * dmax) continue;
        Eigen::MatrixXcd q = qr.householderQ();
        for (int i = 0; i < N; ++i) q.col(i) *= packed(i, i) / std::abs(packed(i, i));
        Eigen::VectorXcd ev(N);
        if (LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', N, q.data(), N, ev.data(), nullptr, 1, nullptr, 1) != 0) continue;
        EigenangleSample s;
        s.N = N;
        s.seed = seed;
        s.trial = trial;
        s.angles.resize(N);
        for (int i = 0; i < N; ++i) {
            double a = std::arg(ev(i));
            if (a < 0) a += kTwoPi;
            if (a >= kTwoPi) a -= kTwoPi;
            s.angles[i] = a;
        }
        std::sort(s.angles.begin(), s.angles.end());
        return s;
    }
    throw NumericalBreakdown("sample_cue: repeated singular draws");
}

void MesoscopicStatistic::validate() const {
    if (N < 1) throw DomainError("statistic: N must be positive");
    if (!(alpha > 0 && alpha < 1)) throw DomainError("statistic: alpha must lie in (0, 1)");
    if (centers.size() != weights.size() || centers.size() != scales.size())
        throw DomainError("statistic: centers, weights and scales must have equal length");
    for (double e : scales)
        if (!(e > 0)) throw DomainError("statistic: scales must be positive");
    if (!(ell > 0)) throw DomainError("statistic: ell must be positive");
    if (periodization < 0) throw DomainError("statistic: periodization must be non-negative");
}

double MesoscopicStatistic::scale_factor() const { return std::pow(static_cast<double>(N), alpha); }

double MesoscopicStatistic::c1_ratio() const {
    double emin = scales.empty() ? 1.0 : *std::min_element(scales.begin(), scales.end());
    return std::pow(static_cast<double>(N), alpha - 1.0) / emin;
}

double MesoscopicStatistic::window_ratio() const { return ell / scale_factor(); }

double MesoscopicStatistic::h(double x) const {
    covariance::KernelParams p{ell};
    double s = 0.0;
    for (std::size_t k = 0; k < centers.size(); ++k)
        if (weights[k] != 0.0)
            s += weights[k] * covariance::smoothed_indicator(x, centers[k], scales[k], mollifier, p);
    return gamma * s;
}

cplx MesoscopicStatistic::h_hat(double kappa) const {
    covariance::KernelParams p{ell};
    cplx s = 0.0;
    for (std::size_t k = 0; k < centers.size(); ++k)
        s += weights[k] * covariance::indicator_hat(kappa, centers[k], p) *
             mollifier.fourier(scales[k] * kappa);
    return gamma * s;
}

double MesoscopicStatistic::periodization_bound() const {
    const double na = scale_factor();
    double total = 0.0;
    for (std::size_t k = 0; k < centers.size(); ++k) {
        if (weights[k] == 0.0) continue;
        const double eps = scales[k];
        double per_point = 0.0;
        for (long m = 0; m < 2000000; ++m) {
            double d = kTwoPi * na * static_cast<double>(periodization + m) - std::abs(centers[k]) - 0.5 * ell;
            if (d <= 0) return std::numeric_limits<double>::infinity();
            double y = d / eps;
            double term = kPi * std::min(mollifier.cdf(-y), ell / eps * mollifier.density(y));
            per_point += 2.0 * term;
            if (term < 1e-30) break;
            if (m == 1999999) per_point += 2.0 * term * static_cast<double>(m);  // crude tail
        }
        total += std::abs(gamma * weights[k]) * per_point;
    }
    return static_cast<double>(N) * total;
}

SmoothedValue smoothed_statistic(const EigenangleSample& sample, const MesoscopicStatistic& stat) {
    stat.validate();
    if (sample.N != stat.N) throw DomainError("smoothed_statistic: sample size differs from statistic N");
    const double na = stat.scale_factor();
    double s = 0.0;
    for (double theta : sample.angles)
        for (int a = -stat.periodization; a <= stat.periodization; ++a)
            s += stat.h(na * (theta + kTwoPi * a));
    return {s, stat.periodization_bound()};
}

ToeplitzSymbol::ToeplitzSymbol(std::vector<cplx> coeffs, double tail) : coeffs_(std::move(coeffs)), tail_(tail) {
    if (coeffs_.size() % 2 == 0) throw DomainError("ToeplitzSymbol: coefficient vector must have odd length");
    band_ = static_cast<int>(coeffs_.size() / 2);
}

ToeplitzSymbol ToeplitzSymbol::real_symbol(const std::vector<cplx>& nonneg, double tail) {
    if (nonneg.empty()) throw DomainError("ToeplitzSymbol: need at least L_0");
    const std::size_t m = nonneg.size() - 1;
    std::vector<cplx> c(2 * m + 1);
    c[m] = nonneg[0].real();
    for (std::size_t k = 1; k <= m; ++k) {
        c[m + k] = nonneg[k];
        c[m - k] = std::conj(nonneg[k]);
    }
    return ToeplitzSymbol(std::move(c), tail);
}

cplx ToeplitzSymbol::coeff(long k) const {
    if (std::abs(k) > band_) return 0.0;
    return coeffs_[static_cast<std::size_t>(k + band_)];
}

bool ToeplitzSymbol::is_real(double tol) const {
    for (int k = 0; k <= band_; ++k)
        if (std::abs(coeff(k) - std::conj(coeff(-k))) > tol * (1.0 + std::abs(coeff(k)))) return false;
    return true;
}

ToeplitzSymbol ToeplitzSymbol::scaled(double t) const {
    std::vector<cplx> c = coeffs_;
    for (auto& x : c) x *= t;
    return ToeplitzSymbol(std::move(c), tail_ * t * t);
}

double ToeplitzSymbol::szego_sum() const {
    cplx s = 0.0;
    for (int k = 1; k <= band_; ++k) s += static_cast<double>(k) * coeff(k) * coeff(-k);
    return s.real();
}

std::vector<cplx> ToeplitzSymbol::log_symbol_on_grid(std::size_t n) const {
    if (n < 2 * static_cast<std::size_t>(band_) + 1) throw DomainError("grid too small for symbol band");
    std::vector<cplx> a(n, cplx(0.0));
    for (long k = -band_; k <= band_; ++k) a[static_cast<std::size_t>((k + static_cast<long>(n)) % static_cast<long>(n))] += coeff(k);
    fft_backward(a);  // sum_k L_k e^{+2 pi i k j / n}
    return a;
}

cplx WienerHopfFactors::c(long k) const {
    if (static_cast<std::size_t>(std::abs(k)) >= grid / 2) return 0.0;
    return c_hat[static_cast<std::size_t>((k + static_cast<long>(grid)) % static_cast<long>(grid))];
}

cplx WienerHopfFactors::b(long k) const {
    if (static_cast<std::size_t>(std::abs(k)) >= grid / 2) return 0.0;
    return b_hat[static_cast<std::size_t>((k + static_cast<long>(grid)) % static_cast<long>(grid))];
}

namespace {

std::size_t factor_grid(const ToeplitzSymbol& s, std::size_t max_index) {
    std::size_t need = std::max<std::size_t>({8 * static_cast<std::size_t>(s.bandwidth() + 1), 4 * (max_index + 1), 1024});
    return next_power_of_two(need);
}

}  // namespace

WienerHopfFactors wiener_hopf(const ToeplitzSymbol& symbol, std::size_t max_index) {
    WienerHopfFactors f;
    const std::size_t n = factor_grid(symbol, max_index);
    f.grid = n;
    std::vector<cplx> a(n, cplx(0.0));
    for (long k = 1; k <= symbol.bandwidth(); ++k) {
        a[static_cast<std::size_t>(k)] += symbol.coeff(k);
        a[n - static_cast<std::size_t>(k)] -= symbol.coeff(-k);
    }
    fft_backward(a);
    std::vector<cplx> c(n), b(n);
    double defect = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        c[j] = std::exp(a[j]);
        b[j] = std::exp(-a[j]);
        defect = std::max(defect, std::abs(std::abs(c[j]) - 1.0));
    }
    fft_forward(c);
    fft_forward(b);
    const double inv = 1.0 / static_cast<double>(n);
    double alias = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        c[j] *= inv;
        b[j] *= inv;
    }
    for (std::size_t j = n / 2 - n / 16; j < n / 2 + n / 16; ++j) alias = std::max(alias, std::abs(c[j]) + std::abs(b[j]));
    f.c_hat = std::move(c);
    f.b_hat = std::move(b);
    f.unimodularity_defect = symbol.is_real() ? defect : std::numeric_limits<double>::quiet_NaN();
    f.aliasing = alias;
    return f;
}

ToeplitzSymbol symbol_coeffs(const MesoscopicStatistic& stat, double tail_tol) {
    stat.validate();
    const double na = stat.scale_factor();
    const double dk = 1.0 / (kTwoPi * na);
    double kmax = 0.0;
    for (double e : stat.scales) kmax = std::max(kmax, stat.mollifier.frequency_cutoff(1e-17) / e);
    auto lhat = [&](long k) { return dk * stat.h_hat(static_cast<double>(k) * dk); };
    auto tail_between = [&](long lo, long hi) {
        double s = 0.0;
        for (long k = lo; k <= hi; ++k) s += 2.0 * static_cast<double>(k) * std::norm(lhat(k));
        return s;
    };
    long m = std::max(8L, static_cast<long>(std::ceil(kmax / dk)));
    double tail = tail_between(m + 1, 2 * m);
    while (tail > tail_tol && m < (1L << 22)) {
        m *= 2;
        tail = tail_between(m + 1, 2 * m);
    }
    if (tail > tail_tol)
        throw ConvergenceError("symbol_coeffs: band limit reached before the tail tolerance", tail);
    std::vector<cplx> c(2 * static_cast<std::size_t>(m) + 1);
    for (long k = -m; k <= m; ++k) c[static_cast<std::size_t>(k + m)] = lhat(k);
    return ToeplitzSymbol(std::move(c), tail);
}

std::vector<cplx> symbol_exp_coeffs(const ToeplitzSymbol& symbol, std::size_t n) {
    const std::size_t g = factor_grid(symbol, n);
    std::vector<cplx> w = symbol.log_symbol_on_grid(g);
    for (auto& x : w) x = std::exp(x);
    fft_forward(w);
    std::vector<cplx> out(2 * n + 1);
    const double inv = 1.0 / static_cast<double>(g);
    for (long k = -static_cast<long>(n); k <= static_cast<long>(n); ++k)
        out[static_cast<std::size_t>(k + static_cast<long>(n))] =
            w[static_cast<std::size_t>((k + static_cast<long>(g)) % static_cast<long>(g))] * inv;
    return out;
}

LogDet toeplitz_laplace(int N, const ToeplitzSymbol& symbol) {
    if (N < 1) throw DomainError("toeplitz_laplace: N must be positive");
    std::vector<cplx> w = symbol_exp_coeffs(symbol, static_cast<std::size_t>(N));
    Eigen::MatrixXcd t(N, N);
    for (int j = 0; j < N; ++j)
        for (int k = 0; k < N; ++k) t(j, k) = w[static_cast<std::size_t>(j - k + N)];
    LogDet d = log_det(t);
    if (symbol.is_real() && !d.positive(1e-6))
        throw NumericalBreakdown("toeplitz_laplace: non-positive determinant (rcond " + std::to_string(d.rcond) + ")");
    return d;
}

BorodinOkounkov bo_rhs(int N, const ToeplitzSymbol& symbol, double tail_tol) {
    if (N < 1) throw DomainError("bo_rhs: N must be positive");
    BorodinOkounkov out;
    out.szego_part = static_cast<double>(N) * symbol.coeff(0).real() + symbol.szego_sum();
    std::size_t reach = static_cast<std::size_t>(N) + 4 * static_cast<std::size_t>(symbol.bandwidth()) + 64;
    WienerHopfFactors f = wiener_hopf(symbol, reach);
    const long limit = static_cast<long>(f.grid / 2) - 1 - N;
    // smallest M with sum_{k > M} k |c_{-(N+k)}|^2 below tolerance
    std::vector<double> terms(static_cast<std::size_t>(limit) + 1, 0.0);
    for (long k = 1; k <= limit; ++k) terms[k] = static_cast<double>(k) * std::norm(f.c(-(N + k)));
    double tail = 0.0;
    long m = limit;
    while (m > 0 && tail + terms[m] < tail_tol) {
        tail += terms[m];
        --m;
    }
    if (2 * m + N >= static_cast<long>(f.grid / 2))
        throw ConvergenceError("bo_rhs: Hankel truncation exceeds the factor grid", tail);
    out.hankel_size = static_cast<int>(m);
    out.tail = tail;
    if (m == 0) {
        out.log_fredholm = 0.0;
    } else {
        Eigen::MatrixXcd bm(m, m), cm(m, m);
        for (long p = 1; p <= m; ++p)
            for (long r = 1; r <= m; ++r) {
                bm(p - 1, r - 1) = f.b(N + p + r - 1);
                cm(p - 1, r - 1) = f.c(-(N + p + r - 1));
            }
        Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(m, m) - bm * cm;
        if (symbol.is_real()) a = 0.5 * (a + a.adjoint()).eval();
        out.log_fredholm = log_det(a).log_abs;
    }
    out.log_value = out.szego_part + out.log_fredholm;
    return out;
}

double hs_tail(const ToeplitzSymbol& symbol, int N) {
    std::size_t reach = static_cast<std::size_t>(N) + 4 * static_cast<std::size_t>(symbol.bandwidth()) + 64;
    WienerHopfFactors f = wiener_hopf(symbol, reach);
    double s = 0.0;
    for (long k = 1; N + k < static_cast<long>(f.grid / 2); ++k)
        s += static_cast<double>(k) * std::norm(f.c(-(N + k)));
    return s;
}

double exact_variance(const ToeplitzSymbol& symbol, int N) {
    double s = 0.0;
    for (long k = 1; k <= symbol.bandwidth(); ++k)
        s += static_cast<double>(std::min<long>(k, N)) * (symbol.coeff(k) * symbol.coeff(-k)).real();
    return 2.0 * s;
}

double gaussian_prediction(const MesoscopicStatistic& stat) {
    stat.validate();
    covariance::KernelParams p{stat.ell};
    double s = 0.0;
    const std::size_t q = stat.centers.size();
    for (std::size_t j = 0; j < q; ++j)
        for (std::size_t k = 0; k < q; ++k) {
            double tj = stat.gamma * stat.weights[j], tk = stat.gamma * stat.weights[k];
            if (tj == 0.0 || tk == 0.0) continue;
            s += tj * tk *
                 covariance::t_exact(stat.centers[j], stat.centers[k], stat.scales[j], stat.scales[k],
                                     stat.mollifier, stat.mollifier, p).value;
        }
    return 0.5 * s;
}

MesoscopicStatistic ChaosSetting::point(double u, double weight) const {
    MesoscopicStatistic s;
    s.N = N;
    s.alpha = alpha;
    s.centers = {u};
    s.weights = {weight};
    s.scales = {eps};
    s.gamma = 1.0;
    s.ell = ell;
    s.mollifier = mollifier;
    s.periodization = periodization;
    return s;
}

double ChaosSetting::mean() const {
    return std::pow(static_cast<double>(N), 1.0 - alpha) * ell / 2.0;
}

double ChaosSetting::variance() const { return exact_variance(symbol_coeffs(point(0.0)), N); }

std::vector<std::vector<double>> cue_chaos_measure(const std::vector<EigenangleSample>& samples,
                                                   const ChaosSetting& setting,
                                                   const std::vector<double>& u_grid) {
    if (!(setting.gamma >= 0)) throw DomainError("cue_chaos_measure: gamma must be non-negative");
    const double mean = setting.mean(), var = setting.variance();
    const double g = setting.gamma;
    std::vector<MesoscopicStatistic> stats;
    for (double u : u_grid) stats.push_back(setting.point(u));
    std::vector<std::vector<double>> out;
    out.reserve(samples.size());
    for (const auto& s : samples) {
        std::vector<double> row(u_grid.size());
        for (std::size_t i = 0; i < u_grid.size(); ++i) {
            double x = smoothed_statistic(s, stats[i]).value;
            row[i] = std::exp(g * (x - mean) - 0.5 * g * g * var);
        }
        out.push_back(std::move(row));
    }
    return out;
}

Estimate cue_second_moment(const ChaosSetting& setting, double r) {
    if (!(r > 0)) throw DomainError("cue_second_moment: r must be positive");
    const ToeplitzSymbol single = symbol_coeffs(setting.point(0.0));
    const double g = setting.gamma;
    const double var = exact_variance(single, setting.N);
    const double mean = static_cast<double>(setting.N) * single.coeff(0).real();
    const double na = std::pow(static_cast<double>(setting.N), setting.alpha);
    const int band = single.bandwidth();
    auto integrand = [&](double d) {
        std::vector<cplx> c(2 * static_cast<std::size_t>(band) + 1);
        for (long k = -band; k <= band; ++k) {
            double kappa = static_cast<double>(k) / (kTwoPi * na);
            c[static_cast<std::size_t>(k + band)] = g * single.coeff(k) * (1.0 + std::polar(1.0, -kTwoPi * d * kappa));
        }
        double ld = toeplitz_laplace(setting.N, ToeplitzSymbol(std::move(c))).log_abs;
        return std::exp(ld - 2.0 * g * mean - g * g * var);
    };
    std::vector<double> edges{0.0};
    for (double e = setting.eps / 8.0; e < r; e *= 2.0) edges.push_back(e);
    edges.push_back(r);
    auto run = [&](int m) {
        auto rule = composite_gauss_legendre(edges, m);
        double s = 0.0;
        for (std::size_t i = 0; i < rule.size(); ++i)
            s += rule.weights[i] * (r - rule.nodes[i]) * integrand(rule.nodes[i]);
        return 2.0 * s;
    };
    double fine = run(8), coarse = run(5);
    return {fine, std::abs(fine - coarse)};
}

}  // namespace mesochaos::cue
