#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "mesochaos/common.hpp"
#include "mesochaos/linalg.hpp"
#include "mesochaos/mollifier.hpp"
#include "mesochaos/quadrature.hpp"

namespace mesochaos::sine {

// K_N(x, y) = sin(pi N (x - y)) / (pi (x - y)), K_N(x, x) = N.
double sine_kernel(int N, double x, double y);

// Real function with numerical support [a, b].
struct TestFunction {
    std::function<double(double)> f;
    double a = 0.0;
    double b = 1.0;
    double operator()(double x) const { return f(x); }
};

struct NystromOptions {
    double panel_width = 0.0;  // 0: min(0.25, 4/N)
    int order = 16;            // nodes per panel, starting value for doubling
    int max_order = 128;
    double tol = 1e-10;        // accepted order-doubling discrepancy
    double fail_tol = 1e-6;    // above this a ConvergenceError is thrown
};

// Nystrom matrix sqrt(w_i) K_N(x_i, x_j) sqrt(w_j) on a composite Gauss-Legendre rule.
struct DiscretizedKernel {
    int N = 1;
    double a = 0.0;
    double b = 1.0;
    QuadratureRule rule;
    Eigen::MatrixXd matrix;

    static DiscretizedKernel make(int N, double a, double b, double panel_width, int order);
    std::size_t size() const { return rule.size(); }
};

// log det(I + t diag(phi) K) on the kernel's nodes; symmetric form when phi >= 0.
LogDet fredholm_log_det(const DiscretizedKernel& kernel, const std::function<double(double)>& phi,
                        double t = 1.0);

struct FredholmResult {
    double value = 0.0;  // log det at the accepted order
    double error = 0.0;  // change under the last order doubling
    int order = 0;
    std::size_t nodes = 0;
};

// log det(I + t K_N phi) on L^2([a, b]), order doubled until the change is below opts.tol.
FredholmResult fredholm_det(int N, const std::function<double(double)>& phi, double a, double b,
                            double t = 1.0, const NystromOptions& opts = {});

// log E exp(sum h(lambda)) = log det(I + (e^h - 1) K_N) on the support of h.
FredholmResult laplace_transform(const TestFunction& h, int N, const NystromOptions& opts = {});

// N int h + 1/2 ||h||^2_{H^{1/2}}, the norm from sampled spectral quadrature with step `step`.
double asymp_prediction(const TestFunction& h, int N, double step = 1e-3);

// P(no point in [a, b]) as a log-value.
FredholmResult gap_probability(int N, double a, double b, const NystromOptions& opts = {});

// h(x) = gamma sum_k t_k (chi_{u_k} * phi_{eps_k})(x) over the points of the density-N process.
struct LinearStatistic {
    std::vector<double> centers;
    std::vector<double> weights;
    std::vector<double> scales;
    double gamma = 1.0;
    double ell = 1.0;
    Mollifier mollifier = Mollifier::gaussian();

    void validate() const;
    double h(double x) const;
    std::complex<double> h_hat(double kappa) const;
    // Interval outside which |h| < tol (support padded by the mollifier tail plus 8 eps).
    TestFunction test_function(double tol = 1e-16) const;
    double mean(int N) const;                   // N int h
    double variance(int N) const;               // int min(|kappa|, N) |h^|^2
    double limiting_variance() const;           // int |kappa| |h^|^2
};

FredholmResult multi_point_laplace(const LinearStatistic& stat, int N, const NystromOptions& opts = {});

// Restriction of the sine process to a window, sampled exactly up to quadrature error:
// eigen-decomposition of the Nystrom matrix, Bernoulli selection of eigenfunctions, then
// sequential projection sampling with panel-wise rejection.
class WindowSampler {
public:
    WindowSampler(int N, double a, double b, const NystromOptions& opts = {});

    std::vector<double> sample(std::uint64_t seed, std::uint64_t trial = 0) const;

    int N() const { return N_; }
    double a() const { return a_; }
    double b() const { return b_; }
    const Eigen::VectorXd& eigenvalues() const { return evals_; }
    // Largest distance of the spectrum from [0, 1].
    double spectrum_breach() const;
    // Expected number of points, trace of the restricted kernel.
    double expected_count() const { return evals_.sum(); }

private:
    Eigen::VectorXd values_at(const std::vector<int>& sel, double x) const;

    int N_;
    double a_, b_;
    int order_;
    std::vector<double> edges_;
    QuadratureRule rule_;
    Eigen::VectorXd evals_;
    Eigen::MatrixXd funcs_;  // eigenfunction values at nodes, L^2 normalized
    std::vector<double> bary_;  // barycentric weights of the reference panel
    std::vector<double> ref_;   // reference nodes on [-1, 1]
};

std::vector<double> sample_sine_window(int N, double a, double b, std::uint64_t seed,
                                       std::uint64_t trial = 0);

// Single-point chaos setting for the sine process of density N.
struct SineChaosSetting {
    int N = 64;
    double eps = 0.05;
    double ell = 1.0;
    double gamma = 0.5;
    Mollifier mollifier = Mollifier::gaussian();

    LinearStatistic point(double u, double weight = 1.0) const;
    double mean() const;
    double variance() const;
};

// exp(gamma (X(u) - EX) - gamma^2/2 Var X) per configuration (rows) and grid point (columns).
std::vector<std::vector<double>> sine_chaos_measure(const std::vector<std::vector<double>>& configs,
                                                    const SineChaosSetting& setting,
                                                    const std::vector<double>& u_grid);

// E[mu([0, r])^2] from two-point Fredholm determinants.
Estimate sine_second_moment(const SineChaosSetting& setting, double r, const NystromOptions& opts = {});

}  // namespace mesochaos::sine
