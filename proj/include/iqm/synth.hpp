#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "iqm/errors.hpp"
#include "iqm/image.hpp"
#include "iqm/rng.hpp"

namespace iqm {

// Blur-plus-noise degradation: K x K Gaussian kernel followed by seeded
// additive Gaussian noise.
struct DegradeSpec {
    int kernel_size = 9;       // K, odd
    double sigma_blur = 2.0;
    double sigma_noise = 0.0;  // std in [0,1] intensity units
    std::uint64_t seed = 0;

    void validate() const {
        if (kernel_size < 1 || kernel_size % 2 == 0)
            throw ParamError("blur kernel size must be odd and >= 1, got " +
                             std::to_string(kernel_size));
        if (!(sigma_blur > 0.0))
            throw ParamError("sigma_blur must be > 0, got " + std::to_string(sigma_blur));
        if (sigma_noise < 0.0)
            throw ParamError("sigma_noise must be >= 0, got " + std::to_string(sigma_noise));
    }
};

// Unsharp-mask sharpening amount and the std of its internal Gaussian.
struct SharpenSpec {
    double gamma = 0.0;
    double radius_sigma = 1.0;

    void validate() const {
        if (gamma < 0.0) throw ParamError("gamma must be >= 0, got " + std::to_string(gamma));
        if (!(radius_sigma > 0.0))
            throw ParamError("radius_sigma must be > 0, got " + std::to_string(radius_sigma));
    }
};

namespace detail {

inline std::vector<double> gaussian_kernel(int taps, double sigma) {
    std::vector<double> k(static_cast<std::size_t>(taps));
    const int c = taps / 2;
    double sum = 0.0;
    for (int i = 0; i < taps; ++i) {
        k[static_cast<std::size_t>(i)] = std::exp(-((i - c) * (i - c)) / (2.0 * sigma * sigma));
        sum += k[static_cast<std::size_t>(i)];
    }
    for (auto& v : k) v /= sum;
    return k;
}

// Separable convolution with replicate-edge borders, no clamping.
inline std::vector<double> convolve_separable(const std::vector<double>& src, int w, int h,
                                              const std::vector<double>& kernel) {
    const int r = static_cast<int>(kernel.size()) / 2;
    std::vector<double> mid(src.size()), out(src.size());
    for (int y = 0; y < h; ++y) {
        const std::size_t row = static_cast<std::size_t>(y) * w;
        for (int x = 0; x < w; ++x) {
            double s = 0.0;
            for (int i = -r; i <= r; ++i) {
                const int xi = std::clamp(x + i, 0, w - 1);
                s += kernel[static_cast<std::size_t>(i + r)] * src[row + xi];
            }
            mid[row + x] = s;
        }
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double s = 0.0;
            for (int i = -r; i <= r; ++i) {
                const int yi = std::clamp(y + i, 0, h - 1);
                s += kernel[static_cast<std::size_t>(i + r)] * mid[static_cast<std::size_t>(yi) * w + x];
            }
            out[static_cast<std::size_t>(y) * w + x] = s;
        }
    }
    return out;
}

inline int unsharp_taps(double radius_sigma) {
    // 6-sigma total support, forced odd.
    return 2 * static_cast<int>(std::ceil(3.0 * radius_sigma)) + 1;
}

}  // namespace detail

inline LumaImage gaussian_blur(const LumaImage& img, const DegradeSpec& spec) {
    spec.validate();
    if (img.width < spec.kernel_size || img.height < spec.kernel_size)
        throw DimensionError("image " + img.shape_string() + " smaller than the " +
                             std::to_string(spec.kernel_size) + "x" +
                             std::to_string(spec.kernel_size) + " blur kernel");
    if (spec.kernel_size == 1) return img;
    const auto kernel = detail::gaussian_kernel(spec.kernel_size, spec.sigma_blur);
    LumaImage out = img;
    out.data = detail::convolve_separable(img.data, img.width, img.height, kernel);
    for (auto& s : out.data) s = std::clamp(s, 0.0, 1.0);
    return out;
}

inline LumaImage add_noise(const LumaImage& img, const DegradeSpec& spec) {
    spec.validate();
    if (spec.sigma_noise == 0.0) return img;
    NormalSampler noise(spec.seed);
    LumaImage out = img;
    for (auto& s : out.data) s = std::clamp(s + spec.sigma_noise * noise.next(), 0.0, 1.0);
    return out;
}

// Blur then noise, in that composition order.
inline LumaImage degrade(const LumaImage& img, const DegradeSpec& spec) {
    return add_noise(gaussian_blur(img, spec), spec);
}

// Transform parameters from a key=value file. Documented keys: kernel_size,
// sigma_blur, sigma_noise, seed, gamma, radius_sigma. '#' comments and blank
// lines allowed; unknown keys are errors.
struct SynthFileConfig {
    std::optional<int> kernel_size;
    std::optional<double> sigma_blur;
    std::optional<double> sigma_noise;
    std::optional<std::uint64_t> seed;
    std::optional<double> gamma;
    std::optional<double> radius_sigma;
};

inline SynthFileConfig load_synth_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path);

    SynthFileConfig cfg;
    std::string line;
    int lineno = 0;
    auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw FormatError(path + ":" + std::to_string(lineno) + ": expected key=value");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        try {
            if (key == "kernel_size")
                cfg.kernel_size = std::stoi(value);
            else if (key == "sigma_blur")
                cfg.sigma_blur = std::stod(value);
            else if (key == "sigma_noise")
                cfg.sigma_noise = std::stod(value);
            else if (key == "seed")
                cfg.seed = std::stoull(value);
            else if (key == "gamma")
                cfg.gamma = std::stod(value);
            else if (key == "radius_sigma")
                cfg.radius_sigma = std::stod(value);
            else
                throw FormatError(path + ":" + std::to_string(lineno) + ": unknown key '" +
                                  key + "'");
        } catch (const FormatError&) {
            throw;
        } catch (const std::exception&) {
            throw FormatError(path + ":" + std::to_string(lineno) + ": bad value '" + value +
                              "' for " + key);
        }
    }
    return cfg;
}

// Classical unsharp masking: adds gamma times the Gaussian high-pass back to
// the image. Over-driving gamma produces the overshoot ringing the omega
// metric is built to catch.
inline LumaImage unsharp_mask(const LumaImage& img, const SharpenSpec& spec) {
    spec.validate();
    const int taps = detail::unsharp_taps(spec.radius_sigma);
    if (img.width < taps || img.height < taps)
        throw DimensionError("image " + img.shape_string() +
                             " smaller than the unsharp Gaussian support (" +
                             std::to_string(taps) + "x" + std::to_string(taps) + ")");
    const auto kernel = detail::gaussian_kernel(taps, spec.radius_sigma);
    const auto smooth = detail::convolve_separable(img.data, img.width, img.height, kernel);
    LumaImage out = img;
    for (std::size_t i = 0; i < out.data.size(); ++i)
        out.data[i] = std::clamp(img.data[i] + spec.gamma * (img.data[i] - smooth[i]), 0.0, 1.0);
    return out;
}

}  // namespace iqm
