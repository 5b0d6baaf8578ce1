#include "mesochaos/quadrature.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <stdexcept>

#include "mesochaos/common.hpp"
#include "mesochaos/rng.hpp"

namespace mesochaos {

namespace {

QuadratureRule build_reference(int m) {
    QuadratureRule rule;
    rule.order = m;
    rule.nodes.resize(m);
    rule.weights.resize(m);
    const int half = (m + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (m + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= m; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dx = p1 / (m * (x * p1 - p0) / (x * x - 1.0));
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // recompute derivative at the converged node
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= m; ++k) {
            double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        double dp = m * (x * p1 - p0) / (x * x - 1.0);
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[m - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[m - 1 - i] = w;
    }
    if (m % 2 == 1) rule.nodes[m / 2] = 0.0;
    return rule;
}

void append_panel(QuadratureRule& out, const QuadratureRule& ref, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    for (std::size_t i = 0; i < ref.size(); ++i) {
        out.nodes.push_back(c + h * ref.nodes[i]);
        out.weights.push_back(h * ref.weights[i]);
    }
}

}  // namespace

double QuadratureRule::integrate(const std::function<double(double)>& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
    return s;
}

double QuadratureRule::total_weight() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
}

const QuadratureRule& gauss_legendre(int m) {
    if (m < 1) throw DomainError("gauss_legendre: order must be positive");
    static std::mutex mu;
    static std::map<int, std::unique_ptr<QuadratureRule>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(m);
    if (it == cache.end())
        it = cache.emplace(m, std::make_unique<QuadratureRule>(build_reference(m))).first;
    return *it->second;
}

QuadratureRule gauss_legendre_rule(int m, double a, double b) {
    QuadratureRule out;
    out.order = m;
    append_panel(out, gauss_legendre(m), a, b);
    return out;
}

QuadratureRule composite_gauss_legendre(std::span<const double> breaks, int m) {
    if (breaks.size() < 2) throw DomainError("composite rule needs at least two breakpoints");
    QuadratureRule out;
    out.order = m;
    const auto& ref = gauss_legendre(m);
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        if (!(breaks[i + 1] > breaks[i])) throw DomainError("breakpoints must increase");
        append_panel(out, ref, breaks[i], breaks[i + 1]);
    }
    return out;
}

QuadratureRule composite_gauss_legendre(std::span<const double> breaks, int m, double h) {
    if (!(h > 0)) throw DomainError("panel width must be positive");
    std::vector<double> fine;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        double a = breaks[i], b = breaks[i + 1];
        int n = std::max(1, static_cast<int>(std::ceil((b - a) / h - 1e-9)));
        for (int k = 0; k < n; ++k) fine.push_back(a + (b - a) * k / n);
    }
    fine.push_back(breaks.back());
    return composite_gauss_legendre(fine, m);
}

namespace {

// Geometric edges can round onto their neighbours near a nonzero endpoint.
std::vector<double> strictly_increasing(const std::vector<double>& e) {
    std::vector<double> out{e.front()};
    for (std::size_t i = 1; i < e.size(); ++i)
        if (e[i] > out.back()) out.push_back(e[i]);
    if (out.back() != e.back()) out.back() = e.back();
    return out;
}

}  // namespace

QuadratureRule graded_gauss_legendre(double a, double b, int m, int levels, double ratio) {
    std::vector<double> edges;
    double len = b - a;
    edges.push_back(a);
    for (int k = levels; k >= 1; --k) edges.push_back(a + len * std::pow(ratio, k));
    edges.push_back(b);
    return composite_gauss_legendre(strictly_increasing(edges), m);
}

QuadratureRule graded_gauss_legendre_both(double a, double b, int m, int levels, double ratio) {
    double half = 0.5 * (b - a);
    std::vector<double> edges;
    edges.push_back(a);
    for (int k = levels; k >= 1; --k) edges.push_back(a + half * std::pow(ratio, k));
    edges.push_back(a + half);
    // Edges closer to b than a few hundred ulps would put nodes on b itself.
    const double floor = 256.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b));
    for (int k = 1; k <= levels && half * std::pow(ratio, k) > floor; ++k) edges.push_back(b - half * std::pow(ratio, k));
    edges.push_back(b);
    return composite_gauss_legendre(strictly_increasing(edges), m);
}

double integrate_panels(const std::function<double(double)>& f, double a, double b, double h,
                        int m) {
    if (b <= a) return 0.0;
    const auto& ref = gauss_legendre(m);
    int n = std::max(1, static_cast<int>(std::ceil((b - a) / h)));
    double step = (b - a) / n, s = 0.0;
    for (int k = 0; k < n; ++k) {
        double c = a + (k + 0.5) * step, hh = 0.5 * step, part = 0.0;
        for (std::size_t i = 0; i < ref.size(); ++i) part += ref.weights[i] * f(c + hh * ref.nodes[i]);
        s += hh * part;
    }
    return s;
}

Estimate randomized_kronecker(const std::function<double(std::span<const double>)>& f, int dim,
                              std::size_t points, int replicates, std::uint64_t seed) {
    static constexpr double primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
    if (dim < 1 || dim > 16) throw DomainError("randomized_kronecker: dimension must lie in [1, 16]");
    if (replicates < 2 || points == 0) throw DomainError("randomized_kronecker: need points and >= 2 replicates");
    Stream rng(seed, static_cast<std::uint64_t>(dim), 0x9c);
    std::vector<double> alpha(dim), shift(dim), z(dim), means;
    for (int k = 0; k < dim; ++k) alpha[k] = std::fmod(std::sqrt(primes[k]), 1.0);
    for (int r = 0; r < replicates; ++r) {
        for (int k = 0; k < dim; ++k) shift[k] = rng.uniform();
        double acc = 0.0;
        for (std::size_t n = 1; n <= points; ++n) {
            for (int k = 0; k < dim; ++k) z[k] = std::fmod(shift[k] + static_cast<double>(n) * alpha[k], 1.0);
            acc += f(z);
        }
        means.push_back(acc / static_cast<double>(points));
    }
    double mean = std::accumulate(means.begin(), means.end(), 0.0) / replicates;
    double var = 0.0;
    for (double x : means) var += (x - mean) * (x - mean);
    var /= replicates - 1;
    return {mean, std::sqrt(var / replicates)};
}

}  // namespace mesochaos
