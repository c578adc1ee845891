#pragma once

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "specdet/image_io.hpp"

namespace specdet {

// Signed difference between an image and its median-filtered version.
struct ResidualImage {
    int width = 0;
    int height = 0;
    std::vector<double> values; // row-major, in [-255, 255] for 8-bit inputs

    double at(int row, int col) const {
        return values[static_cast<std::size_t>(row) * width + col];
    }
};

// L crop origins inside an image, drawn from a seeded SplitMix64 stream.
struct CropSet {
    int crop_size = 0;                          // N
    std::vector<std::pair<int, int>> origins;   // (row, col), length L
    std::uint64_t seed = 0;

    int count() const { return static_cast<int>(origins.size()); }
};

// Accumulated log10 magnitude spectrum over the crops of a residual.
// Stored unshifted: DC at index (0, 0).
struct EnhancedSpectrum {
    int size = 0;       // N
    int crop_count = 0; // L
    std::vector<double> values; // row-major N*N

    double at(int u, int v) const {
        return values[static_cast<std::size_t>(u) * size + v];
    }
    double& at(int u, int v) {
        return values[static_cast<std::size_t>(u) * size + v];
    }
};

constexpr double kDefaultEpsilon = 1e-12;
constexpr int kDefaultCropSize = 64;
constexpr int kDefaultCropCount = 16;

// 5x5 median with edge-replicate padding; the median of the 25 gathered
// values is the 13th order statistic.
GrayImage median_filter_5x5(const GrayImage& img);

// img - median_filter_5x5(img), elementwise.
ResidualImage residual(const GrayImage& img);

// L origins drawn uniformly from the valid origin rectangle. Per origin the
// generator is advanced twice: row = draw mod (height-n+1), then
// col = draw' mod (width-n+1). Duplicates are permitted.
CropSet sample_crops(int width, int height, int n, int l, std::uint64_t seed);

// Unnormalized forward 2D DFT of an n*n row-major tile:
//   F[u,v] = sum_{x,y} tile[x*n+y] * exp(-2*pi*i*(u*x + v*y)/n).
// Row-column decomposition; radix-2 FFT per axis when n is a power of two.
std::vector<std::complex<double>> dft2d(const std::vector<double>& tile, int n);

// E[u,v] = sum over crops of log10(max(|F_crop[u,v]|, epsilon)), crops
// consumed in origin-list order.
EnhancedSpectrum accumulate_spectrum(const ResidualImage& res, const CropSet& crops,
                                     double epsilon = kDefaultEpsilon);

// Full pipeline: to_gray -> residual -> sample_crops -> accumulate_spectrum.
EnhancedSpectrum enhance_image(const Image& img, int n, int l, std::uint64_t seed,
                               double epsilon = kDefaultEpsilon);

// Copy the n*n tile at `origin` out of a residual.
std::vector<double> crop_tile(const ResidualImage& res, std::pair<int, int> origin, int n);

// Quadrant swap for display: DC moves to (n/2, n/2).
EnhancedSpectrum center_shift(const EnhancedSpectrum& spec);

// ".esp" container: "ESP1", N (u32 LE), L (u32 LE), N*N doubles (LE).
std::vector<std::uint8_t> encode_spectrum(const EnhancedSpectrum& spec);
EnhancedSpectrum decode_spectrum(const std::vector<std::uint8_t>& bytes);

void write_spectrum(const std::filesystem::path& path, const EnhancedSpectrum& spec);
EnhancedSpectrum read_spectrum(const std::filesystem::path& path);

} // namespace specdet
