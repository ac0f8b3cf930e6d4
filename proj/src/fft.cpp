#include "qdnls/fft.hpp"

#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qdnls::fft {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::vector<cplx> make_twiddles(std::size_t n) {
    std::vector<cplx> tw(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
        double ang = -2.0 * M_PI * double(k) / double(n);
        tw[k] = cplx(std::cos(ang), std::sin(ang));
    }
    return tw;
}

void fft_pow2(cplx* data, std::size_t n, bool inverse, const cplx* tw) {
    // bit reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        std::size_t stride = n / len;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                cplx w = tw[k * stride];
                if (inverse) w = std::conj(w);
                cplx u = data[i + k];
                cplx v = data[i + k + len / 2] * w;
                data[i + k] = u + v;
                data[i + k + len / 2] = u - v;
            }
        }
    }
}

void fft2d(cplx* data, std::size_t n, bool inverse) {
    if (!is_pow2(n)) throw std::invalid_argument("fft2d: n must be a power of two");
    const std::vector<cplx> tw = make_twiddles(n);
    const cplx* twp = tw.data();

#pragma omp parallel for schedule(static)
    for (long long r = 0; r < (long long)n; ++r)
        fft_pow2(data + (std::size_t)r * n, n, inverse, twp);

#pragma omp parallel
    {
        std::vector<cplx> col(n);
#pragma omp for schedule(static)
        for (long long c = 0; c < (long long)n; ++c) {
            for (std::size_t r = 0; r < n; ++r) col[r] = data[r * n + (std::size_t)c];
            fft_pow2(col.data(), n, inverse, twp);
            for (std::size_t r = 0; r < n; ++r) data[r * n + (std::size_t)c] = col[r];
        }
    }
}

std::vector<cplx> dft_reference(const std::vector<cplx>& in, bool inverse) {
    const std::size_t n = in.size();
    std::vector<cplx> out(n);
    const double sgn = inverse ? 1.0 : -1.0;
    for (std::size_t k = 0; k < n; ++k) {
        cplx acc(0.0, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            double ang = sgn * 2.0 * M_PI * double(j) * double(k) / double(n);
            acc += in[j] * cplx(std::cos(ang), std::sin(ang));
        }
        out[k] = acc;
    }
    return out;
}

std::vector<cplx> dft2d_reference(const std::vector<cplx>& in, std::size_t n,
                                  bool inverse) {
    std::vector<cplx> out(in);
    std::vector<cplx> buf(n);
    for (std::size_t r = 0; r < n; ++r) {
        std::vector<cplx> row(out.begin() + r * n, out.begin() + (r + 1) * n);
        row = dft_reference(row, inverse);
        std::copy(row.begin(), row.end(), out.begin() + r * n);
    }
    for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t r = 0; r < n; ++r) buf[r] = out[r * n + c];
        buf = dft_reference(buf, inverse);
        for (std::size_t r = 0; r < n; ++r) out[r * n + c] = buf[r];
    }
    return out;
}

} // namespace qdnls::fft
