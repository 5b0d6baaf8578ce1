#pragma once

#include <complex>
#include <vector>

namespace mesochaos {

using cplx = std::complex<double>;

// In-place DFT with FFTW's conventions: forward uses e^{-2 pi i jk/n}, both directions unnormalized.
// Plans are cached per (n, direction); execution is safe from concurrent threads.
void fft_forward(std::vector<cplx>& data);
void fft_backward(std::vector<cplx>& data);

bool is_power_of_two(std::size_t n);
std::size_t next_power_of_two(std::size_t n);

}  // namespace mesochaos
