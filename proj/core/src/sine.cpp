#include "mesochaos/sine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mesochaos/covariance.hpp"
#include "mesochaos/rng.hpp"
#include "mesochaos/transforms.hpp"

namespace mesochaos::sine {

double sine_kernel(int N, double x, double y) {
    const double d = x - y;
    const double z = kPi * N * d;
    if (std::abs(z) < 1e-4) return N * (1.0 - z * z / 6.0 + z * z * z * z / 120.0);
    return std::sin(z) / (kPi * d);
}

namespace {

double default_panel_width(int N, const NystromOptions& opts) {
    if (opts.panel_width > 0) return opts.panel_width;
    return std::min(0.25, 6.0 / N);
}

std::vector<double> panel_edges(double a, double b, double width) {
    int n = std::max(1, static_cast<int>(std::ceil((b - a) / width - 1e-12)));
    std::vector<double> e(n + 1);
    for (int i = 0; i <= n; ++i) e[i] = a + (b - a) * i / n;
    e[n] = b;
    return e;
}

void check_interval(double a, double b) {
    if (!(b > a) || !std::isfinite(a) || !std::isfinite(b)) throw DomainError("sine: need a finite interval a < b");
}

}  // namespace

DiscretizedKernel DiscretizedKernel::make(int N, double a, double b, double panel_width, int order) {
    if (N < 1) throw DomainError("sine: N must be positive");
    check_interval(a, b);
    if (order < 2) throw DomainError("sine: quadrature order must be at least 2");
    DiscretizedKernel k;
    k.N = N;
    k.a = a;
    k.b = b;
    auto edges = panel_edges(a, b, panel_width);
    k.rule = composite_gauss_legendre(edges, order);
    const std::size_t n = k.rule.size();
    k.matrix.resize(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const double si = std::sqrt(k.rule.weights[i]);
        for (std::size_t j = 0; j <= i; ++j) {
            double v = si * sine_kernel(N, k.rule.nodes[i], k.rule.nodes[j]) * std::sqrt(k.rule.weights[j]);
            k.matrix(i, j) = v;
            k.matrix(j, i) = v;
        }
    }
    return k;
}

LogDet fredholm_log_det(const DiscretizedKernel& kernel, const std::function<double(double)>& phi, double t) {
    const std::size_t n = kernel.size();
    Eigen::VectorXd p(n);
    bool nonneg = t >= 0;
    for (std::size_t i = 0; i < n; ++i) {
        p(i) = phi(kernel.rule.nodes[i]);
        if (!std::isfinite(p(i))) throw DomainError("fredholm_det: phi is not finite on the domain");
        if (p(i) < 0) nonneg = false;
    }
    Eigen::MatrixXd m;
    if (nonneg) {
        Eigen::VectorXd s = p.cwiseSqrt();
        m = t * (s.asDiagonal() * kernel.matrix * s.asDiagonal());
    } else {
        m = t * (p.asDiagonal() * kernel.matrix);
    }
    m.diagonal().array() += 1.0;
    return log_det(m);
}

FredholmResult fredholm_det(int N, const std::function<double(double)>& phi, double a, double b, double t,
                            const NystromOptions& opts) {
    check_interval(a, b);
    const double width = default_panel_width(N, opts);
    auto eval = [&](int m) {
        LogDet d = fredholm_log_det(DiscretizedKernel::make(N, a, b, width, m), phi, t);
        if (!d.positive(1e-6)) throw NumericalBreakdown("fredholm_det: non-positive determinant");
        return d.log_abs;
    };
    int m = opts.order;
    double v1 = eval(m);
    double last_err = std::numeric_limits<double>::infinity();
    while (2 * m <= opts.max_order) {
        double v2 = eval(2 * m);
        last_err = std::abs(v2 - v1);
        if (last_err < opts.tol) break;
        m *= 2;
        v1 = v2;
    }
    if (!(last_err <= opts.fail_tol))
        throw ConvergenceError("fredholm_det: order doubling did not settle", last_err);
    FredholmResult r;
    r.value = v1;
    r.error = last_err;
    r.order = m;
    r.nodes = panel_edges(a, b, width).size() - 1;
    r.nodes *= static_cast<std::size_t>(m);
    return r;
}

FredholmResult laplace_transform(const TestFunction& h, int N, const NystromOptions& opts) {
    if (!h.f) throw DomainError("laplace_transform: empty test function");
    return fredholm_det(N, [&](double x) { return std::expm1(h(x)); }, h.a, h.b, 1.0, opts);
}

double asymp_prediction(const TestFunction& h, int N, double step) {
    if (!h.f) throw DomainError("asymp_prediction: empty test function");
    check_interval(h.a, h.b);
    std::size_t n = static_cast<std::size_t>(std::ceil((h.b - h.a) / step)) + 1;
    auto s = transforms::SampledFunction::sample(h.f, h.a, step, n);
    double integral = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        double x = s.x(i);
        if (x > h.b) break;
        integral += s.values[i].real();
    }
    integral *= step;
    double norm = transforms::h_half_inner(s, s, transforms::InnerMethod::spectral).value;
    return N * integral + 0.5 * norm;
}

FredholmResult gap_probability(int N, double a, double b, const NystromOptions& opts) {
    return fredholm_det(N, [](double) { return 1.0; }, a, b, -1.0, opts);
}

void LinearStatistic::validate() const {
    if (centers.size() != weights.size() || centers.size() != scales.size())
        throw DomainError("statistic: centers, weights and scales must have equal length");
    if (centers.empty()) throw DomainError("statistic: need at least one point");
    for (double e : scales)
        if (!(e > 0)) throw DomainError("statistic: scales must be positive");
    if (!(ell > 0)) throw DomainError("statistic: ell must be positive");
}

double LinearStatistic::h(double x) const {
    covariance::KernelParams p{ell};
    double s = 0.0;
    for (std::size_t k = 0; k < centers.size(); ++k)
        if (weights[k] != 0.0) s += weights[k] * covariance::smoothed_indicator(x, centers[k], scales[k], mollifier, p);
    return gamma * s;
}

std::complex<double> LinearStatistic::h_hat(double kappa) const {
    covariance::KernelParams p{ell};
    std::complex<double> s = 0.0;
    for (std::size_t k = 0; k < centers.size(); ++k)
        s += weights[k] * covariance::indicator_hat(kappa, centers[k], p) * mollifier.fourier(scales[k] * kappa);
    return gamma * s;
}

TestFunction LinearStatistic::test_function(double tol) const {
    validate();
    double radius = mollifier.tail_radius(tol);
    if (!(radius < 1e3)) throw DomainError("statistic: mollifier tail too heavy for a finite determinant domain");
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t k = 0; k < centers.size(); ++k) {
        double pad = 0.5 * ell + scales[k] * (radius + 8.0);
        lo = std::min(lo, centers[k] - pad);
        hi = std::max(hi, centers[k] + pad);
    }
    return {[s = *this](double x) { return s.h(x); }, lo, hi};
}

double LinearStatistic::mean(int N) const {
    validate();
    double s = 0.0;
    for (double w : weights) s += w;
    return N * gamma * s * kPi * ell;
}

namespace {

double spectral_variance(const LinearStatistic& s, double cap) {
    s.validate();
    double emin = *std::min_element(s.scales.begin(), s.scales.end());
    double kmax = s.mollifier.frequency_cutoff(1e-9) / emin;
    double span = 0.0;
    for (double u : s.centers)
        for (double v : s.centers) span = std::max(span, std::abs(u - v));
    double width = 0.25 / (span + s.ell);
    auto f = [&](double k) { return std::min(k, cap) * std::norm(s.h_hat(k)); };
    double total = 0.0;
    if (cap < kmax) {
        total += integrate_panels(f, 0.0, cap, width);
        total += integrate_panels(f, cap, kmax, width);
    } else {
        total += integrate_panels(f, 0.0, kmax, width);
    }
    return 2.0 * total;
}

}  // namespace

double LinearStatistic::variance(int N) const { return spectral_variance(*this, static_cast<double>(N)); }

double LinearStatistic::limiting_variance() const {
    return spectral_variance(*this, std::numeric_limits<double>::infinity());
}

FredholmResult multi_point_laplace(const LinearStatistic& stat, int N, const NystromOptions& opts) {
    return laplace_transform(stat.test_function(), N, opts);
}

WindowSampler::WindowSampler(int N, double a, double b, const NystromOptions& opts)
    : N_(N), a_(a), b_(b), order_(opts.order) {
    DiscretizedKernel k = DiscretizedKernel::make(N, a, b, default_panel_width(N, opts), order_);
    edges_ = panel_edges(a, b, default_panel_width(N, opts));
    rule_ = k.rule;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k.matrix);
    if (es.info() != Eigen::Success) throw NumericalBreakdown("WindowSampler: eigensolver failed");
    evals_ = es.eigenvalues();
    funcs_ = es.eigenvectors();
    for (std::size_t j = 0; j < rule_.size(); ++j) funcs_.row(j) /= std::sqrt(rule_.weights[j]);
    const auto& ref = gauss_legendre(order_);
    ref_ = ref.nodes;
    bary_.assign(order_, 1.0);
    for (int i = 0; i < order_; ++i) {
        double p = 1.0;
        for (int j = 0; j < order_; ++j)
            if (j != i) p *= ref_[i] - ref_[j];
        bary_[i] = 1.0 / p;
    }
}

double WindowSampler::spectrum_breach() const {
    double lo = evals_.minCoeff(), hi = evals_.maxCoeff();
    return std::max({0.0, -lo, hi - 1.0});
}

Eigen::VectorXd WindowSampler::values_at(const std::vector<int>& sel, double x) const {
    const int panels = static_cast<int>(edges_.size()) - 1;
    int p = static_cast<int>((x - a_) / (b_ - a_) * panels);
    p = std::clamp(p, 0, panels - 1);
    const double lo = edges_[p], hi = edges_[p + 1];
    const double t = 2.0 * (x - lo) / (hi - lo) - 1.0;
    Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(sel.size()));
    const std::size_t base = static_cast<std::size_t>(p) * order_;
    for (int i = 0; i < order_; ++i)
        if (t == ref_[i]) {
            for (std::size_t s = 0; s < sel.size(); ++s) out(s) = funcs_(base + i, sel[s]);
            return out;
        }
    double denom = 0.0;
    for (int i = 0; i < order_; ++i) {
        double c = bary_[i] / (t - ref_[i]);
        denom += c;
        for (std::size_t s = 0; s < sel.size(); ++s) out(s) += c * funcs_(base + i, sel[s]);
    }
    return out / denom;
}

std::vector<double> WindowSampler::sample(std::uint64_t seed, std::uint64_t trial) const {
    Stream rng(seed, trial, 0x51e);
    std::vector<int> sel;
    for (Eigen::Index i = 0; i < evals_.size(); ++i)
        if (rng.uniform() < std::clamp(evals_(i), 0.0, 1.0)) sel.push_back(static_cast<int>(i));
    const std::size_t k = sel.size();
    std::vector<double> points;
    if (k == 0) return points;
    // Panel-wise bounds on |Phi(x)|^2 from a dense probe.
    const int panels = static_cast<int>(edges_.size()) - 1;
    std::vector<double> bound(panels), cumulative(panels);
    const int probes = 4 * order_;
    double acc = 0.0;
    for (int p = 0; p < panels; ++p) {
        double mx = 0.0;
        for (int j = 0; j <= probes; ++j) {
            double x = edges_[p] + (edges_[p + 1] - edges_[p]) * j / probes;
            mx = std::max(mx, values_at(sel, x).squaredNorm());
        }
        bound[p] = 1.25 * mx + 1e-300;
        acc += bound[p] * (edges_[p + 1] - edges_[p]);
        cumulative[p] = acc;
    }
    Eigen::MatrixXd basis(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    for (std::size_t s = 0; s < k; ++s) {
        for (long attempt = 0;; ++attempt) {
            if (attempt > 10000000) throw NumericalBreakdown("WindowSampler: rejection sampler stalled");
            double r = rng.uniform() * acc;
            int p = static_cast<int>(std::lower_bound(cumulative.begin(), cumulative.end(), r) - cumulative.begin());
            p = std::min(p, panels - 1);
            double x = edges_[p] + rng.uniform() * (edges_[p + 1] - edges_[p]);
            Eigen::VectorXd phi = values_at(sel, x);
            Eigen::VectorXd resid = phi;
            for (std::size_t j = 0; j < s; ++j) resid -= basis.col(j).dot(phi) * basis.col(j);
            double density = resid.squaredNorm();
            if (rng.uniform() * bound[p] < density) {
                basis.col(s) = resid / std::sqrt(density);
                points.push_back(x);
                break;
            }
        }
    }
    std::sort(points.begin(), points.end());
    return points;
}

std::vector<double> sample_sine_window(int N, double a, double b, std::uint64_t seed, std::uint64_t trial) {
    return WindowSampler(N, a, b).sample(seed, trial);
}

LinearStatistic SineChaosSetting::point(double u, double weight) const {
    LinearStatistic s;
    s.centers = {u};
    s.weights = {weight};
    s.scales = {eps};
    s.gamma = 1.0;
    s.ell = ell;
    s.mollifier = mollifier;
    return s;
}

double SineChaosSetting::mean() const { return point(0.0).mean(N); }

double SineChaosSetting::variance() const { return point(0.0).variance(N); }

std::vector<std::vector<double>> sine_chaos_measure(const std::vector<std::vector<double>>& configs,
                                                    const SineChaosSetting& setting,
                                                    const std::vector<double>& u_grid) {
    const double mean = setting.mean(), var = setting.variance(), g = setting.gamma;
    covariance::KernelParams p{setting.ell};
    std::vector<std::vector<double>> out;
    out.reserve(configs.size());
    for (const auto& pts : configs) {
        std::vector<double> row(u_grid.size());
        for (std::size_t i = 0; i < u_grid.size(); ++i) {
            double x = 0.0;
            for (double l : pts) x += covariance::smoothed_indicator(l, u_grid[i], setting.eps, setting.mollifier, p);
            row[i] = std::exp(g * (x - mean) - 0.5 * g * g * var);
        }
        out.push_back(std::move(row));
    }
    return out;
}

Estimate sine_second_moment(const SineChaosSetting& setting, double r, const NystromOptions& opts) {
    if (!(r > 0)) throw DomainError("sine_second_moment: r must be positive");
    const double g = setting.gamma;
    const double mean = setting.mean(), var = setting.variance();
    auto pair = [&](double d) {
        LinearStatistic s = setting.point(0.0);
        s.centers = {0.0, d};
        s.weights = {1.0, 1.0};
        s.scales = {setting.eps, setting.eps};
        s.gamma = g;
        return s.test_function();
    };
    // Order promoted once at the widest separation, then reused.
    const TestFunction widest = pair(r);
    const FredholmResult probe = laplace_transform(widest, setting.N, opts);
    const double width = default_panel_width(setting.N, opts);
    auto integrand = [&](double d) {
        TestFunction h = pair(d);
        auto k = DiscretizedKernel::make(setting.N, h.a, h.b, width, probe.order);
        LogDet ld = fredholm_log_det(k, [&](double x) { return std::expm1(h(x)); });
        if (!ld.positive(1e-6)) throw NumericalBreakdown("sine_second_moment: non-positive determinant");
        return std::exp(ld.log_abs - 2.0 * g * mean - g * g * var);
    };
    std::vector<double> edges{0.0};
    for (double e = setting.eps / 8.0; e < r; e *= 2.0) edges.push_back(e);
    edges.push_back(r);
    auto run = [&](int m) {
        auto rule = composite_gauss_legendre(edges, m);
        double s = 0.0;
        for (std::size_t i = 0; i < rule.size(); ++i) s += rule.weights[i] * (r - rule.nodes[i]) * integrand(rule.nodes[i]);
        return 2.0 * s;
    };
    double fine = run(8), coarse = run(5);
    return {fine, std::abs(fine - coarse) + std::abs(fine) * probe.error};
}

}  // namespace mesochaos::sine
