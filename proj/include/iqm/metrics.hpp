#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "iqm/errors.hpp"
#include "iqm/fft.hpp"
#include "iqm/image.hpp"
#include "iqm/sharpness.hpp"

namespace iqm {

inline double mse(const LumaImage& a, const LumaImage& b) {
    require_same_shape(a, b);
    double sum = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const double d = a.data[i] - b.data[i];
        sum += d * d;
    }
    return sum / static_cast<double>(a.data.size());
}

// Uncapped PSNR in dB with MAX = 1; identical images give +infinity (the
// 50 dB clipping is the per-patch omega rule, not this metric's).
inline double psnr(const LumaImage& a, const LumaImage& b) {
    const double e = mse(a, b);
    if (e <= 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / e);
}

inline double l1_loss(const LumaImage& a, const LumaImage& b) {
    require_same_shape(a, b);
    double sum = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) sum += std::abs(a.data[i] - b.data[i]);
    return sum / static_cast<double>(a.data.size());
}

namespace detail {

inline std::vector<double> gaussian_window(int taps, double sigma) {
    std::vector<double> w(static_cast<std::size_t>(taps));
    const int c = taps / 2;
    double sum = 0.0;
    for (int i = 0; i < taps; ++i) {
        w[static_cast<std::size_t>(i)] =
            std::exp(-((i - c) * (i - c)) / (2.0 * sigma * sigma));
        sum += w[static_cast<std::size_t>(i)];
    }
    for (auto& v : w) v /= sum;
    return w;
}

}  // namespace detail

// Mean SSIM with the standard constants: 11x11 Gaussian window sigma 1.5,
// K1 = 0.01, K2 = 0.03, dynamic range 1. Local statistics come from valid
// (border-free) windows, matching the reference formulation. The separable
// filtering runs over a rolling 11-row stripe, so scratch memory stays small
// regardless of image size.
inline double ssim(const LumaImage& a, const LumaImage& b) {
    require_same_shape(a, b);
    constexpr int kTaps = 11;
    if (a.width < kTaps || a.height < kTaps)
        throw DimensionError("ssim needs at least 11x11 images, got " + a.shape_string());
    constexpr double kC1 = 0.01 * 0.01;
    constexpr double kC2 = 0.03 * 0.03;

    const std::vector<double> win = detail::gaussian_window(kTaps, 1.5);
    const int w = a.width, h = a.height;
    const int vw = w - kTaps + 1, vh = h - kTaps + 1;

    // ring of the last 11 horizontally filtered rows for the five moment
    // fields: a, b, a^2, b^2, ab
    const std::size_t stride = static_cast<std::size_t>(vw);
    std::vector<double> ring(5 * static_cast<std::size_t>(kTaps) * stride);
    auto ring_row = [&](int field, int y) {
        return ring.data() + (static_cast<std::size_t>(field) * kTaps + y % kTaps) * stride;
    };

    auto fill_row = [&](int y) {
        const double* ra = a.data.data() + static_cast<std::size_t>(y) * w;
        const double* rb = b.data.data() + static_cast<std::size_t>(y) * w;
        double* out_a = ring_row(0, y);
        double* out_b = ring_row(1, y);
        double* out_aa = ring_row(2, y);
        double* out_bb = ring_row(3, y);
        double* out_ab = ring_row(4, y);
        for (int x = 0; x < vw; ++x) {
            double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
            for (int i = 0; i < kTaps; ++i) {
                const double wi = win[static_cast<std::size_t>(i)];
                const double va = ra[x + i], vb = rb[x + i];
                sa += wi * va;
                sb += wi * vb;
                saa += wi * va * va;
                sbb += wi * vb * vb;
                sab += wi * va * vb;
            }
            out_a[x] = sa;
            out_b[x] = sb;
            out_aa[x] = saa;
            out_bb[x] = sbb;
            out_ab[x] = sab;
        }
    };

    for (int y = 0; y < kTaps - 1; ++y) fill_row(y);

    double sum = 0.0;
    for (int y0 = 0; y0 < vh; ++y0) {
        fill_row(y0 + kTaps - 1);
        const double* rows[5][kTaps];
        for (int f = 0; f < 5; ++f)
            for (int j = 0; j < kTaps; ++j) rows[f][j] = ring_row(f, y0 + j);
        for (int x = 0; x < vw; ++x) {
            double mu_a = 0, mu_b = 0, m_aa = 0, m_bb = 0, m_ab = 0;
            for (int j = 0; j < kTaps; ++j) {
                const double wj = win[static_cast<std::size_t>(j)];
                mu_a += wj * rows[0][j][x];
                mu_b += wj * rows[1][j][x];
                m_aa += wj * rows[2][j][x];
                m_bb += wj * rows[3][j][x];
                m_ab += wj * rows[4][j][x];
            }
            const double var_a = m_aa - mu_a * mu_a;
            const double var_b = m_bb - mu_b * mu_b;
            const double cov = m_ab - mu_a * mu_b;
            const double num = (2.0 * mu_a * mu_b + kC1) * (2.0 * cov + kC2);
            const double den = (mu_a * mu_a + mu_b * mu_b + kC1) * (var_a + var_b + kC2);
            sum += num / den;
        }
    }
    return sum / (static_cast<double>(vw) * vh);
}

// Spectral l1 distance: mean |F(a) - F(b)| over all bins of the unnormalized
// forward 2-D DFT. By linearity this is the mean bin magnitude of F(a - b),
// so identical images score exactly 0.
inline double freq_loss(const LumaImage& a, const LumaImage& b) {
    require_same_shape(a, b);
    std::vector<detail::cplx> diff(a.data.size());
    for (std::size_t i = 0; i < a.data.size(); ++i)
        diff[i] = detail::cplx(a.data[i] - b.data[i], 0.0);
    detail::fft_2d(diff, a.width, a.height);
    double sum = 0.0;
    for (const auto& c : diff) sum += std::abs(c);
    return sum / static_cast<double>(diff.size());
}

enum class BaseLoss { l1, l1_plus_freq };

struct LossParams {
    double beta = 0.1;         // sharpness weight
    double lambda_freq = 1.0;  // frequency-term weight for the l1+freq base
    int q_patch_size = kDefaultQPatchSize;
    double q_tau = kDefaultCoherenceThreshold;

    void validate() const {
        if (beta < 0.0) throw ParamError("beta must be >= 0, got " + std::to_string(beta));
        if (lambda_freq < 0.0)
            throw ParamError("lambda_freq must be >= 0, got " + std::to_string(lambda_freq));
    }
};

// Composite training objective, evaluated as a scalar: base fidelity loss
// minus beta times the restored image's sharpness. May be negative.
inline double composite_loss(const LumaImage& gt, const LumaImage& restored, BaseLoss base,
                             const LossParams& params = {}) {
    params.validate();
    require_same_shape(gt, restored);
    double fidelity = l1_loss(gt, restored);
    if (base == BaseLoss::l1_plus_freq) fidelity += params.lambda_freq * freq_loss(gt, restored);
    const double q = compute_q(restored, params.q_patch_size, params.q_tau).q;
    return fidelity - params.beta * q;
}

}  // namespace iqm
