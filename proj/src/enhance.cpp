#include "specdet/enhance.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <numbers>

#include "specdet/rng.hpp"

namespace specdet {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool is_pow2(int n) {
    return n > 0 && (n & (n - 1)) == 0;
}

// Iterative radix-2 Cooley-Tukey, in place, forward (e^{-i...}).
void fft_pow2(std::complex<double>* a, int n) {
    for (int i = 1, j = 0; i < n; ++i) {
        int bit = n >> 1;
        for (; j & bit; bit >>= 1)
            j ^= bit;
        j ^= bit;
        if (i < j)
            std::swap(a[i], a[j]);
    }
    for (int len = 2; len <= n; len <<= 1) {
        const std::complex<double> wlen = std::polar(1.0, -kTwoPi / len);
        for (int i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (int j = 0; j < len / 2; ++j) {
                std::complex<double> u = a[i + j];
                std::complex<double> v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

// O(n^2) fallback for non power-of-two lengths, table of the n-th roots.
void dft_naive_1d(std::complex<double>* a, int n,
                  const std::vector<std::complex<double>>& roots) {
    std::vector<std::complex<double>> out(n);
    for (int u = 0; u < n; ++u) {
        std::complex<double> acc(0.0, 0.0);
        for (int x = 0; x < n; ++x)
            acc += a[x] * roots[static_cast<std::size_t>(u) * x % n];
        out[u] = acc;
    }
    std::copy(out.begin(), out.end(), a);
}

std::vector<std::complex<double>> make_roots(int n) {
    std::vector<std::complex<double>> roots(n);
    for (int k = 0; k < n; ++k)
        roots[k] = std::polar(1.0, -kTwoPi * k / n);
    return roots;
}

} // namespace

GrayImage median_filter_5x5(const GrayImage& img) {
    GrayImage out;
    out.width = img.width;
    out.height = img.height;
    out.values.resize(img.values.size());

    const int w = img.width;
    const int h = img.height;
#pragma omp parallel for schedule(static)
    for (int row = 0; row < h; ++row) {
        std::array<double, 25> window;
        for (int col = 0; col < w; ++col) {
            int k = 0;
            for (int dy = -2; dy <= 2; ++dy) {
                const int y = std::clamp(row + dy, 0, h - 1);
                for (int dx = -2; dx <= 2; ++dx) {
                    const int x = std::clamp(col + dx, 0, w - 1);
                    window[k++] = img.at(y, x);
                }
            }
            std::nth_element(window.begin(), window.begin() + 12, window.end());
            out.at(row, col) = window[12];
        }
    }
    return out;
}

ResidualImage residual(const GrayImage& img) {
    const GrayImage filtered = median_filter_5x5(img);
    ResidualImage res;
    res.width = img.width;
    res.height = img.height;
    res.values.resize(img.values.size());

    const std::int64_t n = static_cast<std::int64_t>(img.values.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i)
        res.values[i] = img.values[i] - filtered.values[i];
    return res;
}

CropSet sample_crops(int width, int height, int n, int l, std::uint64_t seed) {
    if (n < 8 || n % 2 != 0)
        throw DomainError("sample_crops: crop size must be even and at least 8");
    if (l < 1)
        throw DomainError("sample_crops: crop count must be positive");
    if (width < n || height < n)
        throw DimensionError("sample_crops: image smaller than crop size");

    CropSet crops;
    crops.crop_size = n;
    crops.seed = seed;
    crops.origins.reserve(static_cast<std::size_t>(l));

    const std::uint64_t row_range = static_cast<std::uint64_t>(height - n + 1);
    const std::uint64_t col_range = static_cast<std::uint64_t>(width - n + 1);
    SplitMix64 rng(seed);
    for (int i = 0; i < l; ++i) {
        int row = static_cast<int>(rng.next_below(row_range));
        int col = static_cast<int>(rng.next_below(col_range));
        crops.origins.emplace_back(row, col);
    }
    return crops;
}

std::vector<std::complex<double>> dft2d(const std::vector<double>& tile, int n) {
    if (n < 1 || tile.size() != static_cast<std::size_t>(n) * n)
        throw DimensionError("dft2d: tile size mismatch");

    std::vector<std::complex<double>> f(tile.size());
    for (std::size_t i = 0; i < tile.size(); ++i)
        f[i] = std::complex<double>(tile[i], 0.0);

    const bool pow2 = is_pow2(n);
    const std::vector<std::complex<double>> roots = pow2 ? std::vector<std::complex<double>>{}
                                                         : make_roots(n);

    // Rows, then columns. Each 1D transform is independent.
#pragma omp parallel for schedule(static)
    for (int row = 0; row < n; ++row) {
        std::complex<double>* r = f.data() + static_cast<std::size_t>(row) * n;
        if (pow2)
            fft_pow2(r, n);
        else
            dft_naive_1d(r, n, roots);
    }

#pragma omp parallel for schedule(static)
    for (int col = 0; col < n; ++col) {
        std::vector<std::complex<double>> column(n);
        for (int row = 0; row < n; ++row)
            column[row] = f[static_cast<std::size_t>(row) * n + col];
        if (pow2)
            fft_pow2(column.data(), n);
        else
            dft_naive_1d(column.data(), n, roots);
        for (int row = 0; row < n; ++row)
            f[static_cast<std::size_t>(row) * n + col] = column[row];
    }
    return f;
}

std::vector<double> crop_tile(const ResidualImage& res, std::pair<int, int> origin, int n) {
    const auto [row0, col0] = origin;
    if (row0 < 0 || col0 < 0 || row0 + n > res.height || col0 + n > res.width)
        throw DimensionError("crop_tile: origin out of bounds");

    std::vector<double> tile(static_cast<std::size_t>(n) * n);
    for (int row = 0; row < n; ++row) {
        const double* src = res.values.data() +
                            static_cast<std::size_t>(row0 + row) * res.width + col0;
        std::copy(src, src + n, tile.data() + static_cast<std::size_t>(row) * n);
    }
    return tile;
}

EnhancedSpectrum accumulate_spectrum(const ResidualImage& res, const CropSet& crops,
                                     double epsilon) {
    if (!(epsilon > 0.0))
        throw DomainError("accumulate_spectrum: epsilon must be positive");
    if (crops.count() < 1)
        throw DomainError("accumulate_spectrum: empty crop set");

    const int n = crops.crop_size;
    const int l = crops.count();
    const std::size_t bins = static_cast<std::size_t>(n) * n;

    // Validate up front; nothing may throw inside the parallel region.
    for (const auto& [row, col] : crops.origins)
        if (row < 0 || col < 0 || row + n > res.height || col + n > res.width)
            throw DimensionError("accumulate_spectrum: crop origin out of bounds");

    // Transform every crop first (independent work), then reduce bin by bin
    // in origin-list order so the summation order is fixed.
    std::vector<std::vector<std::complex<double>>> spectra(static_cast<std::size_t>(l));
#pragma omp parallel for schedule(static)
    for (int c = 0; c < l; ++c)
        spectra[c] = dft2d(crop_tile(res, crops.origins[c], n), n);

    EnhancedSpectrum out;
    out.size = n;
    out.crop_count = l;
    out.values.assign(bins, 0.0);

#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(bins); ++i) {
        double acc = 0.0;
        for (int c = 0; c < l; ++c)
            acc += std::log10(std::max(std::abs(spectra[c][i]), epsilon));
        out.values[i] = acc;
    }
    return out;
}

EnhancedSpectrum enhance_image(const Image& img, int n, int l, std::uint64_t seed,
                               double epsilon) {
    if (img.width < n || img.height < n)
        throw DimensionError("enhance_image: image smaller than crop size");

    const GrayImage gray = to_gray(img);
    const ResidualImage res = residual(gray);
    const CropSet crops = sample_crops(res.width, res.height, n, l, seed);
    return accumulate_spectrum(res, crops, epsilon);
}

EnhancedSpectrum center_shift(const EnhancedSpectrum& spec) {
    const int n = spec.size;
    EnhancedSpectrum out;
    out.size = n;
    out.crop_count = spec.crop_count;
    out.values.resize(spec.values.size());
    const int half = n / 2;
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v)
            out.at((u + half) % n, (v + half) % n) = spec.at(u, v);
    return out;
}

namespace {

void put_u32le(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 24));
}

void put_f64le(std::vector<std::uint8_t>& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    for (int i = 0; i < 8; ++i)
        out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

std::uint32_t get_u32le(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

double get_f64le(const std::uint8_t* p) {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i)
        bits |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
}

} // namespace

std::vector<std::uint8_t> encode_spectrum(const EnhancedSpectrum& spec) {
    std::vector<std::uint8_t> out;
    out.reserve(12 + spec.values.size() * 8);
    out.insert(out.end(), {'E', 'S', 'P', '1'});
    put_u32le(out, static_cast<std::uint32_t>(spec.size));
    put_u32le(out, static_cast<std::uint32_t>(spec.crop_count));
    for (double v : spec.values)
        put_f64le(out, v);
    return out;
}

EnhancedSpectrum decode_spectrum(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 12 || std::memcmp(bytes.data(), "ESP1", 4) != 0)
        throw FormatError("esp: bad magic");
    const std::uint32_t n = get_u32le(bytes.data() + 4);
    const std::uint32_t l = get_u32le(bytes.data() + 8);
    if (n == 0 || n > 1u << 15)
        throw FormatError("esp: unreasonable size field");
    const std::size_t bins = static_cast<std::size_t>(n) * n;
    if (bytes.size() != 12 + bins * 8)
        throw FormatError("esp: payload length mismatch");

    EnhancedSpectrum spec;
    spec.size = static_cast<int>(n);
    spec.crop_count = static_cast<int>(l);
    spec.values.resize(bins);
    for (std::size_t i = 0; i < bins; ++i)
        spec.values[i] = get_f64le(bytes.data() + 12 + i * 8);
    return spec;
}

void write_spectrum(const std::filesystem::path& path, const EnhancedSpectrum& spec) {
    write_file(path, encode_spectrum(spec));
}

EnhancedSpectrum read_spectrum(const std::filesystem::path& path) {
    return decode_spectrum(read_file(path));
}

} // namespace specdet
