#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "specdet/image_io.hpp"

namespace specdet {

// Square odd-sized convolution kernel.
struct Kernel {
    int size = 0;
    std::vector<double> taps; // row-major size*size

    static Kernel box(int size); // all ones / size^2
    double at(int row, int col) const {
        return taps[static_cast<std::size_t>(row) * size + col];
    }
};

struct SynthConfig {
    int image_size = 256;
    int upsample_factor = 2;     // >= 2
    Kernel kernel = Kernel::box(3);
    int noise_octaves = 4;
    int count_real = 0;
    int count_fake = 0;
    std::uint64_t seed = 1;
};

struct ManifestEntry {
    std::string path;
    int label = 0; // 0 real, 1 fake
};

struct DatasetManifest {
    std::vector<ManifestEntry> entries;
    std::uint64_t seed = 0;
    std::uint64_t config_digest = 0;
};

// Multi-octave bilinear value noise, no energy concentration at Nyquist
// bins. Deterministic in (cfg.seed, index).
Image gen_real(const SynthConfig& cfg, int index);

// Checkerboard-artifact carrier: low-resolution texture, zero-insertion
// upsample by cfg.upsample_factor, convolve with cfg.kernel
// (edge-replicate), renormalize, quantize. Deterministic in (cfg.seed,
// index).
Image gen_fake(const SynthConfig& cfg, int index);

// Writes real_%05d.pgm / fake_%05d.pgm plus manifest.csv (header
// "path,label", paths relative to the manifest) into out_dir.
DatasetManifest build_dataset(const SynthConfig& cfg, const std::filesystem::path& out_dir);

std::uint64_t config_digest(const SynthConfig& cfg);

// manifest.csv loader; relative paths are resolved against the manifest's
// directory.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

// Exposed for the artifact-suppression comparison: windowed-sinc lowpass
// with cutoff pi/factor.
Kernel lowpass_kernel(int size, int factor);

// Convolution with edge-replicate borders (kernel applied unflipped).
GrayImage filter2d(const GrayImage& img, const Kernel& kernel);

// Zero insertion: out[y*f][x*f] = in[y][x], all other samples 0.
GrayImage zero_insert_upsample(const GrayImage& img, int factor);

} // namespace specdet
