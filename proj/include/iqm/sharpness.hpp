#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "iqm/errors.hpp"
#include "iqm/image.hpp"
#include "iqm/parallel.hpp"
#include "iqm/rng.hpp"

namespace iqm {

// Guard for the s1+s2 denominator; makes the all-zero patch score 0.
inline constexpr double kSpectrumEpsilon = 1e-12;

inline constexpr int kDefaultQPatchSize = 8;
inline constexpr double kDefaultCoherenceDelta = 0.001;
inline constexpr int kDefaultCalibrationTrials = 100000;
inline constexpr std::uint64_t kDefaultCalibrationSeed = 7;

// calibrate_threshold(8, 0.001, 100000, 7), frozen so shipped results never
// depend on a recalibration run. test_sharpness.cpp regenerates and checks it.
inline constexpr double kDefaultCoherenceThreshold = 0.24064149282269515;

struct GradientField {
    int width = 0;
    int height = 0;
    std::vector<double> gx;
    std::vector<double> gy;

    double gx_at(int x, int y) const { return gx[static_cast<std::size_t>(y) * width + x]; }
    double gy_at(int x, int y) const { return gy[static_cast<std::size_t>(y) * width + x]; }
};

namespace detail {

// Central differences on the interior, one-sided at the borders. Operates on
// a raw row-major buffer so synthetic (unnormalized) patches can reuse it.
inline GradientField gradient_field_raw(const double* data, int w, int h) {
    if (w < 2 || h < 2)
        throw DimensionError("gradient field needs at least 2x2 pixels, got " +
                             std::to_string(w) + "x" + std::to_string(h));
    GradientField g;
    g.width = w;
    g.height = h;
    g.gx.resize(static_cast<std::size_t>(w) * h);
    g.gy.resize(static_cast<std::size_t>(w) * h);
    auto px = [&](int x, int y) { return data[static_cast<std::size_t>(y) * w + x]; };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            if (x == 0)
                g.gx[i] = px(1, y) - px(0, y);
            else if (x == w - 1)
                g.gx[i] = px(w - 1, y) - px(w - 2, y);
            else
                g.gx[i] = (px(x + 1, y) - px(x - 1, y)) / 2.0;
            if (y == 0)
                g.gy[i] = px(x, 1) - px(x, 0);
            else if (y == h - 1)
                g.gy[i] = px(x, h - 1) - px(x, h - 2);
            else
                g.gy[i] = (px(x, y + 1) - px(x, y - 1)) / 2.0;
        }
    }
    return g;
}

}  // namespace detail

inline GradientField gradient_field(const LumaImage& img) {
    return detail::gradient_field_raw(img.data.data(), img.width, img.height);
}

// Singular structure of one patch's gradient matrix. s1/s2 are the singular
// values of the stacked k^2 x 2 matrix [gx gy], obtained from the 2x2
// eigenproblem of its Gram matrix.
struct PatchSpectrum {
    double s1 = 0.0;
    double s2 = 0.0;
    double coherence = 0.0;  // (s1-s2)/(s1+s2+eps), in [0,1]
    double q = 0.0;          // s1*(s1-s2)/(s1+s2+eps)
    bool selected = false;
};

namespace detail {

// Spectrum from the accumulated Gram-matrix sums [a b; b c] = G^T G. The 2x2
// eigenproblem is closed form; lambda2 is clamped against rounding negatives.
inline PatchSpectrum spectrum_from_sums(double a, double b, double c) {
    const double root = std::sqrt((a - c) * (a - c) + 4.0 * b * b);
    const double lambda1 = (a + c + root) / 2.0;
    const double lambda2 = std::max((a + c - root) / 2.0, 0.0);

    PatchSpectrum s;
    s.s1 = std::sqrt(lambda1);
    s.s2 = std::sqrt(lambda2);
    const double denom = s.s1 + s.s2 + kSpectrumEpsilon;
    s.coherence = (s.s1 - s.s2) / denom;
    s.q = s.s1 * (s.s1 - s.s2) / denom;
    return s;
}

}  // namespace detail

inline PatchSpectrum patch_spectrum(const GradientField& g, int x0, int y0, int k) {
    double a = 0.0, b = 0.0, c = 0.0;
    for (int y = y0; y < y0 + k; ++y) {
        for (int x = x0; x < x0 + k; ++x) {
            const double gx = g.gx_at(x, y);
            const double gy = g.gy_at(x, y);
            a += gx * gx;
            b += gx * gy;
            c += gy * gy;
        }
    }
    return detail::spectrum_from_sums(a, b, c);
}

// Coherence of a standalone k x k patch treated as its own image.
namespace detail {
inline double patch_coherence_raw(const double* data, int k) {
    const GradientField g = gradient_field_raw(data, k, k);
    return patch_spectrum(g, 0, 0, k).coherence;
}
}  // namespace detail

// Monte-Carlo coherence threshold: the (1-delta) quantile of coherence over
// pure-noise k x k patches (i.i.d. standard normal samples). A patch is
// considered textured when its coherence exceeds what noise alone reaches
// with probability delta.
inline double calibrate_threshold(int k, double delta, int trials,
                                  std::uint64_t seed = kDefaultCalibrationSeed) {
    if (k < 2) throw ParamError("patch size must be >= 2, got " + std::to_string(k));
    if (!(delta > 0.0 && delta < 1.0))
        throw ParamError("confidence delta must lie in (0,1), got " + std::to_string(delta));
    if (trials < 1000)
        throw ParamError("calibration needs >= 1000 trials, got " + std::to_string(trials));

    NormalSampler noise(seed);
    std::vector<double> patch(static_cast<std::size_t>(k) * k);
    std::vector<double> coherences(static_cast<std::size_t>(trials));
    for (int t = 0; t < trials; ++t) {
        for (auto& s : patch) s = noise.next();
        coherences[static_cast<std::size_t>(t)] = detail::patch_coherence_raw(patch.data(), k);
    }
    std::sort(coherences.begin(), coherences.end());
    std::size_t idx = static_cast<std::size_t>(std::floor((1.0 - delta) * trials));
    idx = std::min(idx, coherences.size() - 1);
    return coherences[idx];
}

// Returns the shipped threshold for the default patch size, otherwise
// calibrates with the default Monte-Carlo settings.
inline double default_threshold_for(int k) {
    if (k == kDefaultQPatchSize) return kDefaultCoherenceThreshold;
    return calibrate_threshold(k, kDefaultCoherenceDelta, kDefaultCalibrationTrials,
                               kDefaultCalibrationSeed);
}

struct QResult {
    double q = 0.0;
    int selected_count = 0;
    int total_count = 0;
    int patch_size = 0;
    double threshold = 0.0;
    std::vector<PatchSpectrum> per_patch;  // row-major patch order
};

// No-reference sharpness: mean of s1*(s1-s2)/(s1+s2) over the anisotropic
// patches (coherence above tau), 0 when none qualify. Patch sums are
// accumulated straight from the image (no gradient field is materialized) in
// the same pixel order as patch_spectrum, per-patch values are independent of
// the thread count, and the reduction runs in row-major patch order, so the
// result is bit-identical to the sequential loop over gradient_field.
inline QResult compute_q(const LumaImage& img, int k = kDefaultQPatchSize,
                         double tau = kDefaultCoherenceThreshold, int threads = 1) {
    const PatchGrid grid = tile(img, k);
    if (img.width < 2 || img.height < 2)
        throw DimensionError("gradient field needs at least 2x2 pixels, got " +
                             img.shape_string());

    QResult result;
    result.patch_size = k;
    result.threshold = tau;
    result.total_count = grid.count();
    result.per_patch.resize(static_cast<std::size_t>(grid.count()));

    const int w = img.width, h = img.height;
    const double* data = img.data.data();
    parallel_for(static_cast<std::size_t>(grid.rows), threads,
                 [&](std::size_t row_begin, std::size_t row_end) {
        std::vector<double> acc_a(static_cast<std::size_t>(grid.cols));
        std::vector<double> acc_b(static_cast<std::size_t>(grid.cols));
        std::vector<double> acc_c(static_cast<std::size_t>(grid.cols));
        for (std::size_t r = row_begin; r < row_end; ++r) {
            std::fill(acc_a.begin(), acc_a.end(), 0.0);
            std::fill(acc_b.begin(), acc_b.end(), 0.0);
            std::fill(acc_c.begin(), acc_c.end(), 0.0);
            for (int col = 0; col < grid.cols; ++col) {
                const int x0 = grid.origin_x(col);
                const int y0 = grid.origin_y(static_cast<int>(r));
                double a = 0.0, b = 0.0, c = 0.0;
                for (int y = y0; y < y0 + k; ++y) {
                    const std::size_t rowoff = static_cast<std::size_t>(y) * w;
                    const std::size_t up = static_cast<std::size_t>(y == 0 ? 1 : y + 1 == h ? h - 1 : y + 1) * w;
                    const std::size_t dn = static_cast<std::size_t>(y == 0 ? 0 : y + 1 == h ? h - 2 : y - 1) * w;
                    const double yscale = (y == 0 || y + 1 == h) ? 1.0 : 0.5;
                    for (int x = x0; x < x0 + k; ++x) {
                        double gx;
                        if (x == 0)
                            gx = data[rowoff + 1] - data[rowoff];
                        else if (x == w - 1)
                            gx = data[rowoff + w - 1] - data[rowoff + w - 2];
                        else
                            gx = (data[rowoff + x + 1] - data[rowoff + x - 1]) / 2.0;
                        const double gy = (data[up + x] - data[dn + x]) * yscale;
                        a += gx * gx;
                        b += gx * gy;
                        c += gy * gy;
                    }
                }
                acc_a[static_cast<std::size_t>(col)] = a;
                acc_b[static_cast<std::size_t>(col)] = b;
                acc_c[static_cast<std::size_t>(col)] = c;
            }
            for (int col = 0; col < grid.cols; ++col) {
                PatchSpectrum s = detail::spectrum_from_sums(acc_a[static_cast<std::size_t>(col)],
                                                             acc_b[static_cast<std::size_t>(col)],
                                                             acc_c[static_cast<std::size_t>(col)]);
                s.selected = s.coherence > tau;
                result.per_patch[r * static_cast<std::size_t>(grid.cols) +
                                 static_cast<std::size_t>(col)] = s;
            }
        }
    });

    double sum = 0.0;
    for (const PatchSpectrum& s : result.per_patch) {
        if (s.selected) {
            sum += s.q;
            ++result.selected_count;
        }
    }
    result.q = result.selected_count > 0 ? sum / result.selected_count : 0.0;
    return result;
}

}  // namespace iqm
