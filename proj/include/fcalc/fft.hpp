#pragma once

// Self-contained complex DFT used by the grid transforms. Radix-2
// Cooley-Tukey for power-of-two lengths, direct O(N^2) evaluation
// otherwise (grids only require even N; non-power-of-two sizes are
// small in practice).

#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace fcalc {

using cplx = std::complex<double>;

namespace detail {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Twiddle table e^{-2*pi*i*j/n}, j = 0..n/2-1.
inline std::vector<cplx> twiddles(std::size_t n) {
    std::vector<cplx> w(n / 2);
    const double step = -2.0 * std::numbers::pi / static_cast<double>(n);
    for (std::size_t j = 0; j < n / 2; ++j)
        w[j] = std::polar(1.0, step * static_cast<double>(j));
    return w;
}

inline void fft_pow2(cplx* data, std::size_t n, bool inverse) {
    // bit reversal
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }
    const std::vector<cplx> w = twiddles(n);
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t stride = n / len;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t j = 0; j < len / 2; ++j) {
                cplx tw = w[j * stride];
                if (inverse) tw = std::conj(tw);
                const cplx u = data[i + j];
                const cplx v = data[i + j + len / 2] * tw;
                data[i + j] = u + v;
                data[i + j + len / 2] = u - v;
            }
        }
    }
}

inline void dft_direct(cplx* data, std::size_t n, bool inverse) {
    const double sgn = inverse ? 1.0 : -1.0;
    std::vector<cplx> out(n, cplx{0.0, 0.0});
    const double step = sgn * 2.0 * std::numbers::pi / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
        cplx acc{0.0, 0.0};
        for (std::size_t j = 0; j < n; ++j)
            acc += data[j] * std::polar(1.0, step * static_cast<double>(k * j % n));
        out[k] = acc;
    }
    for (std::size_t k = 0; k < n; ++k) data[k] = out[k];
}

} // namespace detail

// In-place DFT without normalization: X_k = sum_j x_j e^{-2*pi*i*jk/n}
// (inverse flips the sign, still unnormalized).
inline void fft_inplace(cplx* data, std::size_t n, bool inverse) {
    if (n == 0) throw std::invalid_argument("fft: empty transform");
    if (n == 1) return;
    if (detail::is_pow2(n))
        detail::fft_pow2(data, n, inverse);
    else
        detail::dft_direct(data, n, inverse);
}

// Transform along every axis of a dense row-major n-dimensional array
// with `npts` points per axis.
inline void fft_nd(std::vector<cplx>& data, int dim, std::size_t npts, bool inverse) {
    std::size_t total = 1;
    for (int d = 0; d < dim; ++d) total *= npts;
    if (data.size() != total) throw std::invalid_argument("fft_nd: size mismatch");
    std::vector<cplx> line(npts);
    // axis d has stride npts^(dim-1-d) in row-major order
    std::size_t stride = total / npts;
    for (int d = 0; d < dim; ++d) {
        const std::size_t nlines = total / npts;
        for (std::size_t l = 0; l < nlines; ++l) {
            // decompose line index into (outer, inner) around the axis
            const std::size_t outer = l / stride;
            const std::size_t inner = l % stride;
            const std::size_t base = outer * stride * npts + inner;
            for (std::size_t j = 0; j < npts; ++j) line[j] = data[base + j * stride];
            fft_inplace(line.data(), npts, inverse);
            for (std::size_t j = 0; j < npts; ++j) data[base + j * stride] = line[j];
        }
        stride /= npts;
    }
}

} // namespace fcalc
