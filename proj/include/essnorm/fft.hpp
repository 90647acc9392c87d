#pragma once

#include <complex>
#include <cstddef>
#include <vector>

// Iterative radix-2 complex FFT for the power-of-two circle grids. Forward
// transform is unnormalized, F_k = sum_j f_j e^(-2 pi i jk/n); the inverse
// divides by n. Multi-dimensional grids transform one axis at a time.

namespace essnorm::fft {

void transform(std::complex<double>* a, std::size_t n, bool inverse);

/// Row-major array with extents dims (each a power of two).
void transform_nd(std::vector<std::complex<double>>& a,
                  const std::vector<std::size_t>& dims, bool inverse);

}  // namespace essnorm::fft
