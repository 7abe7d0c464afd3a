#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "iqm/errors.hpp"
#include "iqm/image.hpp"
#include "iqm/parallel.hpp"
#include "iqm/sharpness.hpp"

namespace iqm {

struct OmegaParams {
    double steepness = 5.0;   // R
    double midpoint = 1.2;    // alpha0
    int patch_size = 16;      // m
    double psnr_cap = 50.0;   // dB, fixed
    double alpha_cap = 10.0;  // deviation assigned when texture is invented on a flat patch

    void validate() const {
        if (!(steepness > 0.0))
            throw ParamError("sigmoid steepness must be > 0, got " + std::to_string(steepness));
        if (!(midpoint > 0.0))
            throw ParamError("sigmoid midpoint must be > 0, got " + std::to_string(midpoint));
        if (patch_size < 2)
            throw ParamError("omega patch size must be >= 2, got " + std::to_string(patch_size));
        if (psnr_cap != 50.0)
            throw ParamError("psnr cap is fixed at 50 dB, got " + std::to_string(psnr_cap));
    }
};

struct PatchOmega {
    int row = 0;
    int col = 0;
    double q_ref = 0.0;   // Q of the reference patch
    double q_rest = 0.0;  // Q of the restored patch
    double alpha = 0.0;   // |q_rest - q_ref| / q_ref
    double sigma = 0.0;   // sharpness-deviation weight
    double p_prime = 0.0; // clipped PSNR, dB
    double omega = 0.0;   // (1-sigma)*p_prime + sigma*q_rest
};

struct OmegaResult {
    double omega = 0.0;
    std::vector<PatchOmega> per_patch;  // row-major patch order
    PatchGrid grid;
    OmegaParams params;
};

// Sharpness of one m x m region treated as a standalone image: singular
// values of its own gradient field (one-sided differences at the region
// borders), no anisotropy selection. Every tile gets a value, which the
// deviation ratio requires.
inline double patch_q(const LumaImage& img, int x0, int y0, int m) {
    if (m < 2) throw ParamError("patch size must be >= 2, got " + std::to_string(m));
    auto px = [&](int x, int y) { return img.at(x0 + x, y0 + y); };
    double a = 0.0, b = 0.0, c = 0.0;
    for (int y = 0; y < m; ++y) {
        for (int x = 0; x < m; ++x) {
            double gx, gy;
            if (x == 0)
                gx = px(1, y) - px(0, y);
            else if (x == m - 1)
                gx = px(m - 1, y) - px(m - 2, y);
            else
                gx = (px(x + 1, y) - px(x - 1, y)) / 2.0;
            if (y == 0)
                gy = px(x, 1) - px(x, 0);
            else if (y == m - 1)
                gy = px(x, m - 1) - px(x, m - 2);
            else
                gy = (px(x, y + 1) - px(x, y - 1)) / 2.0;
            a += gx * gx;
            b += gx * gy;
            c += gy * gy;
        }
    }
    return detail::spectrum_from_sums(a, b, c).q;
}

inline double patch_q(const LumaImage& patch) { return patch_q(patch, 0, 0, patch.width); }

// Relative sharpness deviation, Q=0 singularities resolved by policy: a flat
// patch faithfully kept is no deviation; texture invented on a flat patch is
// capped deviation (all weight moves to PSNR).
inline double deviation_ratio(double q_ref, double q_rest, double alpha_cap = 10.0) {
    if (q_ref >= kSpectrumEpsilon) return std::abs(q_rest - q_ref) / q_ref;
    if (q_rest < kSpectrumEpsilon) return 0.0;
    return alpha_cap;
}

// sigma(alpha) = 1 / (1 + exp(R*(alpha - alpha0))). exp saturation yields the
// open-interval limits 0 and 1.
inline double weight(double alpha, const OmegaParams& params = {}) {
    return 1.0 / (1.0 + std::exp(params.steepness * (alpha - params.midpoint)));
}

namespace detail {
inline double clipped_psnr_from_mse(double mse, double cap) {
    if (mse <= 0.0) return cap;
    return std::min(10.0 * std::log10(1.0 / mse), cap);
}

inline double region_mse(const LumaImage& a, const LumaImage& b, int x0, int y0, int m) {
    double sum = 0.0;
    for (int y = y0; y < y0 + m; ++y) {
        for (int x = x0; x < x0 + m; ++x) {
            const double d = a.at(x, y) - b.at(x, y);
            sum += d * d;
        }
    }
    return sum / (static_cast<double>(m) * m);
}
}  // namespace detail

// PSNR clipped at `cap` dB; identical patches score the cap instead of
// infinity. Intensities are in [0,1], so MAX = 1.
inline double clipped_psnr(const LumaImage& p, const LumaImage& p_tilde, double cap = 50.0) {
    require_same_shape(p, p_tilde);
    double sum = 0.0;
    for (std::size_t i = 0; i < p.data.size(); ++i) {
        const double d = p.data[i] - p_tilde.data[i];
        sum += d * d;
    }
    return detail::clipped_psnr_from_mse(sum / static_cast<double>(p.data.size()), cap);
}

// Full-reference quality: per patch, a sigmoid-weighted blend of clipped PSNR
// and restored-patch sharpness; the image score is the patch mean. Patches
// may be evaluated in parallel, the mean is reduced in row-major order, so
// any thread count reproduces the sequential result bit for bit.
inline OmegaResult compute_omega(const LumaImage& ref, const LumaImage& rest,
                                 const OmegaParams& params = {}, int threads = 1) {
    params.validate();
    require_same_shape(ref, rest);
    const PatchGrid grid = tile(ref, params.patch_size);

    OmegaResult result;
    result.grid = grid;
    result.params = params;
    result.per_patch.resize(static_cast<std::size_t>(grid.count()));

    const int m = params.patch_size;
    parallel_for(result.per_patch.size(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            PatchOmega p;
            p.row = static_cast<int>(i) / grid.cols;
            p.col = static_cast<int>(i) % grid.cols;
            const int x0 = grid.origin_x(p.col);
            const int y0 = grid.origin_y(p.row);
            p.q_ref = patch_q(ref, x0, y0, m);
            p.q_rest = patch_q(rest, x0, y0, m);
            p.alpha = deviation_ratio(p.q_ref, p.q_rest, params.alpha_cap);
            p.sigma = weight(p.alpha, params);
            p.p_prime = detail::clipped_psnr_from_mse(detail::region_mse(ref, rest, x0, y0, m),
                                                      params.psnr_cap);
            p.omega = (1.0 - p.sigma) * p.p_prime + p.sigma * p.q_rest;
            result.per_patch[i] = p;
        }
    });

    double sum = 0.0;
    for (const PatchOmega& p : result.per_patch) sum += p.omega;
    result.omega = sum / static_cast<double>(result.per_patch.size());
    return result;
}

}  // namespace iqm
