#include <cmath>

#include <benchmark/benchmark.h>

#include "mesochaos/covariance.hpp"
#include "mesochaos/cue.hpp"
#include "mesochaos/gaussian_field.hpp"
#include "mesochaos/sine.hpp"

using namespace mesochaos;

namespace {

cue::MesoscopicStatistic two_point(int N) {
    cue::MesoscopicStatistic s;
    s.N = N;
    s.alpha = 0.5;
    s.centers = {0.0, 0.5};
    s.weights = {1.0, 1.0};
    s.scales = {0.1, 0.1};
    return s;
}

void toeplitz_log_det(benchmark::State& st) {
    const int N = static_cast<int>(st.range(0));
    const auto sym = cue::symbol_coeffs(two_point(N));
    for (auto _ : st) benchmark::DoNotOptimize(cue::toeplitz_laplace(N, sym).log_abs);
    st.SetComplexityN(N);
}
BENCHMARK(toeplitz_log_det)->RangeMultiplier(2)->Range(64, 512)->Unit(benchmark::kMillisecond)->Complexity();

void borodin_okounkov(benchmark::State& st) {
    const int N = static_cast<int>(st.range(0));
    const auto sym = cue::symbol_coeffs(two_point(N));
    for (auto _ : st) benchmark::DoNotOptimize(cue::bo_rhs(N, sym).log_value);
}
BENCHMARK(borodin_okounkov)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void fredholm(benchmark::State& st) {
    const int N = static_cast<int>(st.range(0));
    sine::TestFunction h{[](double x) { return std::exp(-x * x / (2 * 0.045 * 0.045)); }, -0.45, 0.45};
    for (auto _ : st) benchmark::DoNotOptimize(sine::laplace_transform(h, N).value);
    st.SetComplexityN(N);
}
BENCHMARK(fredholm)->RangeMultiplier(2)->Range(4, 64)->Unit(benchmark::kMillisecond)->Complexity();

void cue_sampler(benchmark::State& st) {
    const int N = static_cast<int>(st.range(0));
    std::uint64_t t = 0;
    for (auto _ : st) benchmark::DoNotOptimize(cue::sample_cue(N, 1, t++).angles.data());
}
BENCHMARK(cue_sampler)->Arg(32)->Arg(128)->Unit(benchmark::kMicrosecond);

void spectral_synthesis(benchmark::State& st) {
    const double eps = 1.0 / static_cast<double>(st.range(0));
    auto plan = field::SpectralSynthesisPlan::make(0.0, 1.0, eps, Mollifier::gaussian(), {});
    std::uint64_t t = 0;
    for (auto _ : st) benchmark::DoNotOptimize(field::sample_field(plan, 1, t++).values.data());
    st.counters["fft_size"] = static_cast<double>(plan.fft_size);
}
BENCHMARK(spectral_synthesis)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);

void covariance_t_exact(benchmark::State& st) {
    const auto phi = Mollifier::gaussian();
    const double eps = 1.0 / static_cast<double>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(covariance::t_exact(0.0, 0.3, eps, eps, phi, phi).value);
}
BENCHMARK(covariance_t_exact)->Arg(10)->Arg(1000)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
