#pragma once

#include <complex>

namespace tsl::fft {

// In-place unscaled complex DFTs on an n^dim cube, FFTW sign conventions:
// forward applies e^{-ik.x}, backward applies e^{+ik.x}.
// Plans are cached per (dim, n, direction) and execution is thread-safe.
void forward(int dim, int n, std::complex<double>* data);
void backward(int dim, int n, std::complex<double>* data);

}  // namespace tsl::fft
