#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "iqm/errors.hpp"

namespace iqm {

// Single-channel image, row-major, intensities in [0,1]. This is the operand
// type of every metric in the library; color inputs are reduced to luma at
// load time.
struct LumaImage {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    LumaImage() = default;

    LumaImage(int w, int h, double fill = 0.0)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {
        if (w < 1 || h < 1)
            throw DimensionError("image dimensions must be >= 1x1, got " +
                                 std::to_string(w) + "x" + std::to_string(h));
    }

    double at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    double& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }

    std::size_t pixel_count() const { return data.size(); }

    bool same_shape(const LumaImage& other) const {
        return width == other.width && height == other.height;
    }

    std::string shape_string() const {
        return std::to_string(width) + "x" + std::to_string(height);
    }

    // Copies the axis-aligned w x h region with top-left corner (x0, y0).
    LumaImage crop(int x0, int y0, int w, int h) const {
        LumaImage out(w, h);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                out.at(x, y) = at(x0 + x, y0 + y);
        return out;
    }
};

inline void require_same_shape(const LumaImage& a, const LumaImage& b) {
    if (!a.same_shape(b))
        throw DimensionError("image shapes differ: " + a.shape_string() + " vs " +
                             b.shape_string());
}

// Non-overlapping axis-aligned tiling of the top-left floor-multiple region.
// Trailing strips narrower than patch_size are excluded.
struct PatchGrid {
    int patch_size = 0;
    int rows = 0;
    int cols = 0;

    int count() const { return rows * cols; }
    int origin_x(int col) const { return col * patch_size; }
    int origin_y(int row) const { return row * patch_size; }
};

inline PatchGrid tile(const LumaImage& img, int patch_size) {
    if (patch_size < 2)
        throw ParamError("patch size must be >= 2, got " + std::to_string(patch_size));
    const int rows = img.height / patch_size;
    const int cols = img.width / patch_size;
    if (rows < 1 || cols < 1)
        throw DimensionError("image " + img.shape_string() + " smaller than one " +
                             std::to_string(patch_size) + "x" + std::to_string(patch_size) +
                             " patch; need at least " + std::to_string(patch_size) + "x" +
                             std::to_string(patch_size));
    return PatchGrid{patch_size, rows, cols};
}

// BT.601 luma from 8-bit RGB codes, normalized to [0,1].
inline double luma_from_rgb8(unsigned char r, unsigned char g, unsigned char b) {
    const double y = (0.299 * r + 0.587 * g + 0.114 * b) / 255.0;
    return std::clamp(y, 0.0, 1.0);
}

}  // namespace iqm
