#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace qdnls::fft {

using cplx = std::complex<double>;

/// True if n is a power of two (and nonzero).
bool is_pow2(std::size_t n);

/// Forward twiddle table e^{-2*pi*i*k/n}, k = 0..n/2-1.
std::vector<cplx> make_twiddles(std::size_t n);

/// In-place iterative radix-2 transform of length n (power of two).
/// Unnormalized: forward computes sum_j a_j e^{-2*pi*i*jk/n}, inverse the
/// conjugate sum. `tw` must come from make_twiddles(n).
void fft_pow2(cplx* data, std::size_t n, bool inverse, const cplx* tw);

/// Unnormalized 2D transform of an n x n row-major array, rows then columns.
/// Row and column passes are OpenMP-parallel.
void fft2d(cplx* data, std::size_t n, bool inverse);

/// Naive O(n^2) reference DFT, same convention as fft_pow2. Serial; used as
/// the independent oracle for the fast path and in the benchmark.
std::vector<cplx> dft_reference(const std::vector<cplx>& in, bool inverse);

/// Naive 2D reference transform (row/column application of dft_reference).
std::vector<cplx> dft2d_reference(const std::vector<cplx>& in, std::size_t n,
                                  bool inverse);

} // namespace qdnls::fft
