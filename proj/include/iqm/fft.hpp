#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

namespace iqm::detail {

using cplx = std::complex<double>;

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// Iterative radix-2 Cooley-Tukey, n a power of two.
inline void fft_pow2(std::vector<cplx>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n < 2) return;
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * std::numbers::pi / static_cast<double>(len);
        const cplx wlen = std::polar(1.0, ang);
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                const cplx u = a[i + j];
                const cplx v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse)
        for (auto& x : a) x /= static_cast<double>(n);
}

// Bluestein chirp-z for arbitrary n, expressed as a power-of-two convolution.
inline void fft_bluestein(std::vector<cplx>& a, bool inverse) {
    const std::size_t n = a.size();
    const std::size_t m = next_pow2(2 * n - 1);
    const double sign = inverse ? 1.0 : -1.0;

    // chirp[k] = exp(sign*i*pi*k^2/n); k^2 taken mod 2n keeps the angle exact.
    std::vector<cplx> chirp(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t k2 = (k * k) % (2 * n);
        chirp[k] = std::polar(1.0, sign * std::numbers::pi * static_cast<double>(k2) /
                                       static_cast<double>(n));
    }

    std::vector<cplx> u(m, cplx(0.0)), v(m, cplx(0.0));
    for (std::size_t k = 0; k < n; ++k) u[k] = a[k] * chirp[k];
    v[0] = std::conj(chirp[0]);
    for (std::size_t k = 1; k < n; ++k) v[k] = v[m - k] = std::conj(chirp[k]);

    fft_pow2(u, false);
    fft_pow2(v, false);
    for (std::size_t k = 0; k < m; ++k) u[k] *= v[k];
    fft_pow2(u, true);

    for (std::size_t k = 0; k < n; ++k) a[k] = u[k] * chirp[k];
    if (inverse)
        for (auto& x : a) x /= static_cast<double>(n);
}

// In-place DFT of any length. Forward transform is unnormalized; the inverse
// divides by n.
inline void fft(std::vector<cplx>& a, bool inverse = false) {
    if (a.size() < 2) return;
    if (is_pow2(a.size()))
        fft_pow2(a, inverse);
    else
        fft_bluestein(a, inverse);
}

// Unnormalized forward 2-D DFT of a w x h row-major buffer: rows, then
// columns.
inline void fft_2d(std::vector<cplx>& buf, int w, int h) {
    std::vector<cplx> line;
    line.resize(static_cast<std::size_t>(w));
    for (int y = 0; y < h; ++y) {
        const std::size_t off = static_cast<std::size_t>(y) * w;
        for (int x = 0; x < w; ++x) line[static_cast<std::size_t>(x)] = buf[off + x];
        fft(line);
        for (int x = 0; x < w; ++x) buf[off + x] = line[static_cast<std::size_t>(x)];
    }
    line.resize(static_cast<std::size_t>(h));
    for (int x = 0; x < w; ++x) {
        for (int y = 0; y < h; ++y)
            line[static_cast<std::size_t>(y)] = buf[static_cast<std::size_t>(y) * w + x];
        fft(line);
        for (int y = 0; y < h; ++y)
            buf[static_cast<std::size_t>(y) * w + x] = line[static_cast<std::size_t>(y)];
    }
}

}  // namespace iqm::detail
