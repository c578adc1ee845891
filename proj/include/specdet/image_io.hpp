#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "specdet/errors.hpp"

namespace specdet {

// Decoded 8-bit raster. Interleaved RGB when channels == 3.
struct Image {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<std::uint8_t> pixels; // row-major, width*height*channels

    std::size_t sample_count() const {
        return static_cast<std::size_t>(width) * height * channels;
    }
};

// Canonical single-channel real-valued raster consumed by the enhancement
// pipeline.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<double> values; // row-major, width*height

    double at(int row, int col) const {
        return values[static_cast<std::size_t>(row) * width + col];
    }
    double& at(int row, int col) {
        return values[static_cast<std::size_t>(row) * width + col];
    }
};

// Binary PGM ("P5") / PPM ("P6") decoder, maxval 255 only. Header comments
// ('#' lines) are accepted anywhere before the maxval.
Image decode_pnm(const std::vector<std::uint8_t>& bytes);

// Encode a GrayImage as binary PGM, mapping [lo, hi] linearly onto [0, 255]
// with clamping and half-away-from-zero rounding. Requires hi > lo.
std::vector<std::uint8_t> encode_pgm(const GrayImage& img, double lo, double hi);

// channels == 1 passes through; channels == 3 uses BT.601 luma
// 0.299 R + 0.587 G + 0.114 B without rounding.
GrayImage to_gray(const Image& img);

// Bilinear resample (pixel-center convention). Used for the pixel-domain
// baseline features.
GrayImage resize_bilinear(const GrayImage& img, int out_width, int out_height);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

inline Image read_pnm(const std::filesystem::path& path) {
    return decode_pnm(read_file(path));
}

} // namespace specdet
