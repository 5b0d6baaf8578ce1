#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "mesochaos/common.hpp"
#include "mesochaos/gaussian_field.hpp"
#include "mesochaos/linalg.hpp"
#include "mesochaos/mollifier.hpp"

namespace mesochaos::cue {

using cplx = std::complex<double>;

struct EigenangleSample {
    int N = 0;
    std::vector<double> angles;  // in [0, 2 pi)
    std::uint64_t seed = 0;
    std::uint64_t trial = 0;
    std::string sampler = "ginibre_qr";
};

// Haar unitary from the QR factorization of a complex Ginibre matrix, with the phases of diag(R)
// moved into Q; numerically singular draws are redrawn (at most 8 times).
EigenangleSample sample_cue(int N, std::uint64_t seed, std::uint64_t trial = 0);

// Linear statistic sum_j sum_k gamma t_k (chi_{u_k} * phi_{eps_k})(N^alpha theta_j), theta taken
// 2 pi periodic through h^{(2pi)}(theta) = sum_{|a| <= periodization} h(N^alpha (theta + 2 pi a)).
struct MesoscopicStatistic {
    int N = 1;
    double alpha = 0.5;
    std::vector<double> centers;
    std::vector<double> weights;
    std::vector<double> scales;
    double gamma = 1.0;
    double ell = 1.0;
    Mollifier mollifier = Mollifier::gaussian();
    int periodization = 2;

    void validate() const;
    double scale_factor() const;  // N^alpha
    // N^{alpha - 1} / min eps; small values mean the smoothing scale holds many eigenvalues.
    double c1_ratio() const;
    // ell N^{-alpha}; small values keep the window inside one period.
    double window_ratio() const;
    double h(double x) const;
    cplx h_hat(double kappa) const;  // int h(x) e^{-2 pi i kappa x} dx
    // Deterministic bound on the part of the periodized sum beyond |a| <= periodization.
    double periodization_bound() const;
};

struct SmoothedValue {
    double value = 0.0;
    double truncation_bound = 0.0;
};

SmoothedValue smoothed_statistic(const EigenangleSample& sample, const MesoscopicStatistic& stat);

// Symbol log w(theta) = sum_{|k| <= M} L_k e^{i k theta}.
class ToeplitzSymbol {
public:
    ToeplitzSymbol() = default;
    // coeffs[k + M] = L_k
    explicit ToeplitzSymbol(std::vector<cplx> coeffs, double tail = 0.0);
    // Real symbol from L_0..L_M with L_{-k} = conj(L_k).
    static ToeplitzSymbol real_symbol(const std::vector<cplx>& nonnegative, double tail = 0.0);

    int bandwidth() const { return band_; }
    cplx coeff(long k) const;
    bool is_real(double tol = 1e-14) const;
    ToeplitzSymbol scaled(double t) const;
    // sum_{k>=1} k L_k L_{-k}
    double szego_sum() const;
    // estimate of sum_{k > M} k |L_k|^2 dropped by truncating to the band
    double truncation_tail() const { return tail_; }
    // log w on a grid of n points theta_j = 2 pi j / n
    std::vector<cplx> log_symbol_on_grid(std::size_t n) const;

private:
    std::vector<cplx> coeffs_;
    int band_ = 0;
    double tail_ = 0.0;
};

// Fourier coefficients of c(theta) = exp(sum_{k>=1} L_k e^{ik theta} - sum_{k>=1} L_{-k} e^{-ik theta})
// and b = 1/c, valid for |k| <= max_index.
struct WienerHopfFactors {
    std::size_t grid = 0;
    std::vector<cplx> c_hat;  // index k mod grid
    std::vector<cplx> b_hat;
    double unimodularity_defect = 0.0;  // max | |c(theta)| - 1 | on the grid (real symbols)
    double aliasing = 0.0;              // size of coefficients near the grid Nyquist index
    cplx c(long k) const;
    cplx b(long k) const;
};
WienerHopfFactors wiener_hopf(const ToeplitzSymbol& symbol, std::size_t max_index);

// L_k = (2 pi N^alpha)^{-1} h^(k / (2 pi N^alpha)), band chosen so the dropped
// sum_{|k|>M} k|L_k|^2 is below `tail_tol`.
ToeplitzSymbol symbol_coeffs(const MesoscopicStatistic& stat, double tail_tol = 1e-14);

// Fourier coefficients w_k, |k| < n, of w = exp(log symbol).
std::vector<cplx> symbol_exp_coeffs(const ToeplitzSymbol& symbol, std::size_t n);

// log det T_N(w), T_jk = w_{j-k}; equals log E exp(sum_j log w(theta_j)) for CUE(N).
LogDet toeplitz_laplace(int N, const ToeplitzSymbol& symbol);

struct BorodinOkounkov {
    double log_value = 0.0;       // log of the right-hand side
    double szego_part = 0.0;      // N L_0 + sum_k k L_k L_{-k}
    double log_fredholm = 0.0;    // log det(I - Q_N H(b) H(c~) Q_N), truncated
    int hankel_size = 0;
    double tail = 0.0;            // sum_{k > M} k |c_{-(N+k)}|^2 beyond the truncation
};
BorodinOkounkov bo_rhs(int N, const ToeplitzSymbol& symbol, double tail_tol = 1e-12);

// ||H(c~) Q_N||_2^2 = sum_{k>=1} k |c_{-(N+k)}|^2
double hs_tail(const ToeplitzSymbol& symbol, int N);

// 2 sum_{k>=1} min(k, N) |L_k|^2: variance of the linear statistic under CUE(N).
double exact_variance(const ToeplitzSymbol& symbol, int N);

// (1/2) sum_{j,k} (gamma t_j)(gamma t_k) T_{eps_j, eps_k}(u_j, u_k).
double gaussian_prediction(const MesoscopicStatistic& stat);

// Single-point chaos setting: X(u) = sum_j (chi_u * phi_eps)(N^alpha theta_j).
struct ChaosSetting {
    int N = 64;
    double alpha = 0.5;
    double eps = 0.05;
    double ell = 1.0;
    double gamma = 0.5;
    Mollifier mollifier = Mollifier::gaussian();
    int periodization = 2;

    MesoscopicStatistic point(double u, double weight = 1.0) const;
    double mean() const;      // E X(u) = N L_0
    double variance() const;  // exact finite-N Var X(u)
};

// exp(gamma (X(u) - EX) - gamma^2/2 Var X) for every sample (rows) and grid point (columns).
std::vector<std::vector<double>> cue_chaos_measure(const std::vector<EigenangleSample>& samples,
                                                   const ChaosSetting& setting,
                                                   const std::vector<double>& u_grid);

// E[mu(w)^2] = int int E exp(X~(u) + X~(v)) du dv for w = 1_{[0, r]}, by Toeplitz determinants.
Estimate cue_second_moment(const ChaosSetting& setting, double r);

}  // namespace mesochaos::cue
