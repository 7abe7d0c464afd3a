#pragma once

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "iqm/errors.hpp"
#include "iqm/image.hpp"

namespace iqm {

namespace detail {

inline std::string lower_extension(const std::string& path) {
    const std::size_t dot = path.find_last_of('.');
    if (dot == std::string::npos) return "";
    std::string ext = path.substr(dot + 1);
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

inline unsigned char quantize8(double s) {
    const double c = std::clamp(s, 0.0, 1.0);
    return static_cast<unsigned char>(std::lround(c * 255.0));
}

struct FileCloser {
    std::FILE* f = nullptr;
    ~FileCloser() {
        if (f) std::fclose(f);
    }
};

// ---- PGM / PPM (binary, maxval 255) ----

// Reads the next header token, skipping whitespace and '#' comment lines.
inline std::string pnm_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
            continue;
        }
        if (!std::isspace(c)) {
            tok.push_back(static_cast<char>(c));
            break;
        }
    }
    while ((c = in.get()) != EOF && !std::isspace(c)) tok.push_back(static_cast<char>(c));
    return tok;
}

inline LumaImage load_pnm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);

    const std::string magic = pnm_token(in);
    const bool gray = magic == "P5";
    const bool rgb = magic == "P6";
    if (!gray && !rgb) {
        if (magic == "P2" || magic == "P3")
            throw FormatError(path + ": ASCII PNM variant " + magic +
                              " unsupported (binary P5/P6 only)");
        throw FormatError(path + ": not a binary PGM/PPM file");
    }

    int w = 0, h = 0, maxval = 0;
    try {
        w = std::stoi(pnm_token(in));
        h = std::stoi(pnm_token(in));
        maxval = std::stoi(pnm_token(in));
    } catch (const std::exception&) {
        throw FormatError(path + ": malformed PNM header");
    }
    if (w < 1 || h < 1) throw FormatError(path + ": bad dimensions in PNM header");
    if (maxval != 255)
        throw FormatError(path + ": maxval " + std::to_string(maxval) +
                          " unsupported (8-bit maxval 255 only)");

    const std::size_t channels = rgb ? 3 : 1;
    std::vector<unsigned char> raw(static_cast<std::size_t>(w) * h * channels);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size())
        throw FormatError(path + ": truncated PNM pixel data");

    LumaImage img(w, h);
    if (gray) {
        for (std::size_t i = 0; i < img.pixel_count(); ++i) img.data[i] = raw[i] / 255.0;
    } else {
        for (std::size_t i = 0; i < img.pixel_count(); ++i)
            img.data[i] = luma_from_rgb8(raw[3 * i], raw[3 * i + 1], raw[3 * i + 2]);
    }
    return img;
}

inline void save_pgm(const LumaImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    std::vector<unsigned char> raw(img.pixel_count());
    for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = quantize8(img.data[i]);
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out) throw IoError("write failed for " + path);
}

// ---- PNG via libpng ----

inline LumaImage load_png(const std::string& path) {
    FileCloser fc{std::fopen(path.c_str(), "rb")};
    if (!fc.f) throw IoError("cannot open " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("libpng init failed");
    }

    std::vector<unsigned char> pixels;
    std::vector<png_bytep> row_ptrs;
    int w = 0, h = 0, channels = 0;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError(path + ": PNG decode failed");
    }

    png_init_io(png, fc.f);
    png_read_info(png, info);

    const int bit_depth = png_get_bit_depth(png, info);
    const int color_type = png_get_color_type(png, info);
    if (bit_depth == 16) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError(path + ": 16-bit PNG unsupported (8-bit only)");
    }

    // Normalize every accepted layout to 8-bit gray or RGB.
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if ((color_type & PNG_COLOR_MASK_ALPHA) || png_get_valid(png, info, PNG_INFO_tRNS))
        png_set_strip_alpha(png);
    png_set_interlace_handling(png);
    png_read_update_info(png, info);

    w = static_cast<int>(png_get_image_width(png, info));
    h = static_cast<int>(png_get_image_height(png, info));
    channels = png_get_channels(png, info);
    if (channels != 1 && channels != 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError(path + ": unsupported PNG channel layout (" +
                          std::to_string(channels) + " channels after expansion)");
    }

    pixels.resize(static_cast<std::size_t>(w) * h * channels);
    row_ptrs.resize(h);
    for (int y = 0; y < h; ++y)
        row_ptrs[y] = pixels.data() + static_cast<std::size_t>(y) * w * channels;

    png_read_image(png, row_ptrs.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    LumaImage img(w, h);
    if (channels == 1) {
        for (std::size_t i = 0; i < img.pixel_count(); ++i) img.data[i] = pixels[i] / 255.0;
    } else {
        for (std::size_t i = 0; i < img.pixel_count(); ++i)
            img.data[i] = luma_from_rgb8(pixels[3 * i], pixels[3 * i + 1], pixels[3 * i + 2]);
    }
    return img;
}

inline void save_png(const LumaImage& img, const std::string& path) {
    std::vector<unsigned char> raw(img.pixel_count());
    for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = quantize8(img.data[i]);
    std::vector<png_bytep> row_ptrs(img.height);
    for (int y = 0; y < img.height; ++y)
        row_ptrs[y] = raw.data() + static_cast<std::size_t>(y) * img.width;

    FileCloser fc{std::fopen(path.c_str(), "wb")};
    if (!fc.f) throw IoError("cannot open " + path + " for writing");

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("libpng init failed");
    }

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("PNG write failed for " + path);
    }

    png_init_io(png, fc.f);
    png_set_IHDR(png, info, img.width, img.height, 8, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, row_ptrs.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

}  // namespace detail

// Decodes an 8-bit grayscale or RGB image (PNG, or binary PGM/PPM with
// maxval 255) into normalized luma. RGB is reduced with BT.601 weights.
inline LumaImage load_image(const std::string& path) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw IoError("cannot open " + path);
    unsigned char magic[8] = {};
    probe.read(reinterpret_cast<char*>(magic), 8);
    const std::streamsize got = probe.gcount();
    probe.close();

    static const unsigned char png_sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    if (got >= 8 && std::memcmp(magic, png_sig, 8) == 0) return detail::load_png(path);
    if (got >= 2 && magic[0] == 'P') return detail::load_pnm(path);
    throw FormatError(path + ": unrecognized image container (PNG or binary PGM/PPM expected)");
}

// Clamps to [0,1], quantizes with round-half-up to 8 bits, and writes
// grayscale PNG or PGM depending on the file extension.
inline void save_image(const LumaImage& img, const std::string& path) {
    const std::string ext = detail::lower_extension(path);
    if (ext == "png")
        detail::save_png(img, path);
    else if (ext == "pgm")
        detail::save_pgm(img, path);
    else
        throw FormatError(path + ": unsupported output extension ." + ext +
                          " (png or pgm expected)");
}

}  // namespace iqm
