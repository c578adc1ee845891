#include "specdet/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numbers>

#include "specdet/rng.hpp"

namespace specdet {

namespace {

constexpr std::uint64_t kRealStream = 0x5245414cull; // "REAL"
constexpr std::uint64_t kFakeStream = 0x46414b45ull; // "FAKE"

void validate(const SynthConfig& cfg) {
    if (cfg.image_size < 2)
        throw DomainError("synthgen: image_size too small");
    if (cfg.upsample_factor < 2)
        throw DomainError("synthgen: upsample_factor must be >= 2");
    if (cfg.image_size % cfg.upsample_factor != 0)
        throw DomainError("synthgen: image_size must be divisible by upsample_factor");
    if (cfg.kernel.size < 1 || cfg.kernel.size % 2 == 0)
        throw DomainError("synthgen: kernel size must be odd");
    if (cfg.kernel.taps.size() !=
        static_cast<std::size_t>(cfg.kernel.size) * cfg.kernel.size)
        throw DomainError("synthgen: kernel tap count mismatch");
    if (cfg.noise_octaves < 1)
        throw DomainError("synthgen: need at least one octave");
}

// Sum of bilinearly interpolated random corner grids, halving amplitude per
// octave. Grid resolution starts at 4 cells and doubles each octave.
std::vector<double> value_noise(int size, int octaves, std::uint64_t stream_seed) {
    std::vector<double> acc(static_cast<std::size_t>(size) * size, 0.0);
    double amplitude = 1.0;
    for (int octave = 0; octave < octaves; ++octave, amplitude *= 0.5) {
        const int cells = std::min(4 << octave, size);
        const int corners = cells + 1;
        std::vector<double> grid(static_cast<std::size_t>(corners) * corners);
        SplitMix64 rng(mix_seed(stream_seed, static_cast<std::uint64_t>(octave)));
        for (double& g : grid)
            g = rng.next_double();

        const double scale = static_cast<double>(cells) / size;
        for (int y = 0; y < size; ++y) {
            const double fy = y * scale;
            const int cy = std::min(static_cast<int>(fy), cells - 1);
            const double wy = fy - cy;
            const double* top = grid.data() + static_cast<std::size_t>(cy) * corners;
            const double* bot = top + corners;
            double* row = acc.data() + static_cast<std::size_t>(y) * size;
            for (int x = 0; x < size; ++x) {
                const double fx = x * scale;
                const int cx = std::min(static_cast<int>(fx), cells - 1);
                const double wx = fx - cx;
                const double v0 = top[cx] * (1.0 - wx) + top[cx + 1] * wx;
                const double v1 = bot[cx] * (1.0 - wx) + bot[cx + 1] * wx;
                row[x] += amplitude * (v0 * (1.0 - wy) + v1 * wy);
            }
        }
    }
    return acc;
}

// Min/max normalize to [0, 255] and quantize, rounding half away from zero.
// Quantization is the last step for both generators so the two classes
// share the same quantization noise character.
Image quantize_image(const std::vector<double>& values, int size) {
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    const double range = hi - lo;

    Image img;
    img.width = size;
    img.height = size;
    img.channels = 1;
    img.pixels.resize(values.size());
    if (range < 1e-12) {
        std::fill(img.pixels.begin(), img.pixels.end(), std::uint8_t{0});
        return img;
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double t = (values[i] - lo) * (255.0 / range);
        img.pixels[i] = static_cast<std::uint8_t>(std::lround(std::clamp(t, 0.0, 255.0)));
    }
    return img;
}

} // namespace

Kernel Kernel::box(int size) {
    Kernel k;
    k.size = size;
    k.taps.assign(static_cast<std::size_t>(size) * size,
                  1.0 / (static_cast<double>(size) * size));
    return k;
}

Kernel lowpass_kernel(int size, int factor) {
    if (size < 1 || size % 2 == 0)
        throw DomainError("lowpass_kernel: size must be odd");
    // Separable Hann-windowed sinc with cutoff 1/(2*factor) cycles/sample.
    const int half = size / 2;
    std::vector<double> tap1d(size);
    double sum = 0.0;
    for (int i = 0; i < size; ++i) {
        const double t = i - half;
        const double cutoff = 1.0 / (2.0 * factor);
        double s;
        if (t == 0.0)
            s = 2.0 * cutoff;
        else
            s = std::sin(2.0 * std::numbers::pi * cutoff * t) / (std::numbers::pi * t);
        const double window =
            0.5 + 0.5 * std::cos(std::numbers::pi * t / (half + 1));
        tap1d[i] = s * window;
        sum += tap1d[i];
    }
    for (double& v : tap1d)
        v /= sum;

    Kernel k;
    k.size = size;
    k.taps.resize(static_cast<std::size_t>(size) * size);
    for (int r = 0; r < size; ++r)
        for (int c = 0; c < size; ++c)
            k.taps[static_cast<std::size_t>(r) * size + c] = tap1d[r] * tap1d[c];
    return k;
}

GrayImage filter2d(const GrayImage& img, const Kernel& kernel) {
    const int half = kernel.size / 2;
    GrayImage out;
    out.width = img.width;
    out.height = img.height;
    out.values.resize(img.values.size());

#pragma omp parallel for schedule(static)
    for (int row = 0; row < img.height; ++row) {
        for (int col = 0; col < img.width; ++col) {
            double acc = 0.0;
            for (int dy = -half; dy <= half; ++dy) {
                const int y = std::clamp(row + dy, 0, img.height - 1);
                for (int dx = -half; dx <= half; ++dx) {
                    const int x = std::clamp(col + dx, 0, img.width - 1);
                    acc += img.at(y, x) * kernel.at(dy + half, dx + half);
                }
            }
            out.at(row, col) = acc;
        }
    }
    return out;
}

GrayImage zero_insert_upsample(const GrayImage& img, int factor) {
    GrayImage out;
    out.width = img.width * factor;
    out.height = img.height * factor;
    out.values.assign(static_cast<std::size_t>(out.width) * out.height, 0.0);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            out.at(y * factor, x * factor) = img.at(y, x);
    return out;
}

Image gen_real(const SynthConfig& cfg, int index) {
    validate(cfg);
    const std::uint64_t stream =
        mix_seed(cfg.seed, kRealStream, static_cast<std::uint64_t>(index));
    return quantize_image(value_noise(cfg.image_size, cfg.noise_octaves, stream),
                          cfg.image_size);
}

Image gen_fake(const SynthConfig& cfg, int index) {
    validate(cfg);
    const std::uint64_t stream =
        mix_seed(cfg.seed, kFakeStream, static_cast<std::uint64_t>(index));
    const int low_size = cfg.image_size / cfg.upsample_factor;

    GrayImage low;
    low.width = low_size;
    low.height = low_size;
    low.values = value_noise(low_size, cfg.noise_octaves, stream);

    const GrayImage up = zero_insert_upsample(low, cfg.upsample_factor);
    const GrayImage smoothed = filter2d(up, cfg.kernel);
    return quantize_image(smoothed.values, cfg.image_size);
}

std::uint64_t config_digest(const SynthConfig& cfg) {
    // FNV-1a over the canonical field serialization.
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto feed = [&h](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xff;
            h *= 0x100000001b3ull;
        }
    };
    auto feed_double = [&](double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        feed(bits);
    };
    feed(static_cast<std::uint64_t>(cfg.image_size));
    feed(static_cast<std::uint64_t>(cfg.upsample_factor));
    feed(static_cast<std::uint64_t>(cfg.kernel.size));
    for (double t : cfg.kernel.taps)
        feed_double(t);
    feed(static_cast<std::uint64_t>(cfg.noise_octaves));
    feed(static_cast<std::uint64_t>(cfg.count_real));
    feed(static_cast<std::uint64_t>(cfg.count_fake));
    feed(cfg.seed);
    return h;
}

DatasetManifest build_dataset(const SynthConfig& cfg, const std::filesystem::path& out_dir) {
    validate(cfg);
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec)
        throw IoError("build_dataset: cannot create " + out_dir.string());

    DatasetManifest manifest;
    manifest.seed = cfg.seed;
    manifest.config_digest = config_digest(cfg);
    manifest.entries.reserve(static_cast<std::size_t>(cfg.count_real) + cfg.count_fake);

    char name[32];
    for (int i = 0; i < cfg.count_real; ++i) {
        std::snprintf(name, sizeof name, "real_%05d.pgm", i);
        manifest.entries.push_back({name, 0});
    }
    for (int i = 0; i < cfg.count_fake; ++i) {
        std::snprintf(name, sizeof name, "fake_%05d.pgm", i);
        manifest.entries.push_back({name, 1});
    }

    const int total = cfg.count_real + cfg.count_fake;
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < total; ++i) {
        const bool fake = i >= cfg.count_real;
        const int index = fake ? i - cfg.count_real : i;
        const Image img = fake ? gen_fake(cfg, index) : gen_real(cfg, index);
        write_file(out_dir / manifest.entries[i].path, encode_pgm(to_gray(img), 0.0, 255.0));
    }

    std::ofstream csv(out_dir / "manifest.csv", std::ios::trunc);
    if (!csv)
        throw IoError("build_dataset: cannot create " + (out_dir / "manifest.csv").string());
    csv << "path,label\n";
    for (const auto& entry : manifest.entries)
        csv << entry.path << ',' << entry.label << '\n';
    if (!csv)
        throw IoError("build_dataset: manifest write failed");
    return manifest;
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open manifest " + path.string());

    const std::filesystem::path base = path.parent_path();
    std::vector<ManifestEntry> entries;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (first) {
            first = false;
            if (line == "path,label")
                continue;
            throw FormatError("manifest: missing path,label header");
        }
        const std::size_t comma = line.rfind(',');
        if (comma == std::string::npos || comma == 0 || comma + 1 >= line.size())
            throw FormatError("manifest: malformed row: " + line);
        const std::string label_str = line.substr(comma + 1);
        if (label_str != "0" && label_str != "1")
            throw FormatError("manifest: label must be 0 or 1: " + line);

        std::filesystem::path p = line.substr(0, comma);
        if (p.is_relative())
            p = base / p;
        entries.push_back({p.string(), label_str == "1" ? 1 : 0});
    }
    if (entries.empty())
        throw FormatError("manifest: no entries in " + path.string());
    return entries;
}

} // namespace specdet
