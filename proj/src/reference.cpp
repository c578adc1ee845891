#include "specdet/reference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace specdet::ref {

GrayImage median_filter_5x5(const GrayImage& img) {
    GrayImage out;
    out.width = img.width;
    out.height = img.height;
    out.values.resize(img.values.size());

    std::vector<double> window;
    window.reserve(25);
    for (int row = 0; row < img.height; ++row) {
        for (int col = 0; col < img.width; ++col) {
            window.clear();
            for (int dy = -2; dy <= 2; ++dy) {
                for (int dx = -2; dx <= 2; ++dx) {
                    int y = std::clamp(row + dy, 0, img.height - 1);
                    int x = std::clamp(col + dx, 0, img.width - 1);
                    window.push_back(img.at(y, x));
                }
            }
            std::sort(window.begin(), window.end());
            out.at(row, col) = window[12];
        }
    }
    return out;
}

ResidualImage residual(const GrayImage& img) {
    const GrayImage filtered = ref::median_filter_5x5(img);
    ResidualImage res;
    res.width = img.width;
    res.height = img.height;
    res.values.resize(img.values.size());
    for (std::size_t i = 0; i < img.values.size(); ++i)
        res.values[i] = img.values[i] - filtered.values[i];
    return res;
}

std::vector<std::complex<double>> dft2d(const std::vector<double>& tile, int n) {
    if (n < 1 || tile.size() != static_cast<std::size_t>(n) * n)
        throw DimensionError("ref::dft2d: tile size mismatch");

    // exp(-2 pi i k / n) for k in [0, n); (u*x + v*y) reduces mod n exactly.
    std::vector<std::complex<double>> roots(n);
    for (int k = 0; k < n; ++k)
        roots[k] = std::polar(1.0, -2.0 * std::numbers::pi * k / n);

    std::vector<std::complex<double>> f(tile.size());
    for (int u = 0; u < n; ++u) {
        for (int v = 0; v < n; ++v) {
            std::complex<double> acc(0.0, 0.0);
            for (int x = 0; x < n; ++x) {
                for (int y = 0; y < n; ++y) {
                    std::size_t k = (static_cast<std::size_t>(u) * x +
                                     static_cast<std::size_t>(v) * y) % n;
                    acc += tile[static_cast<std::size_t>(x) * n + y] * roots[k];
                }
            }
            f[static_cast<std::size_t>(u) * n + v] = acc;
        }
    }
    return f;
}

EnhancedSpectrum accumulate_spectrum(const ResidualImage& res, const CropSet& crops,
                                     double epsilon) {
    if (!(epsilon > 0.0))
        throw DomainError("ref::accumulate_spectrum: epsilon must be positive");

    const int n = crops.crop_size;
    EnhancedSpectrum out;
    out.size = n;
    out.crop_count = crops.count();
    out.values.assign(static_cast<std::size_t>(n) * n, 0.0);

    for (const auto& origin : crops.origins) {
        const auto spectrum = ref::dft2d(crop_tile(res, origin, n), n);
        for (std::size_t i = 0; i < out.values.size(); ++i)
            out.values[i] += std::log10(std::max(std::abs(spectrum[i]), epsilon));
    }
    return out;
}

EnhancedSpectrum enhance_image(const Image& img, int n, int l, std::uint64_t seed,
                               double epsilon) {
    if (img.width < n || img.height < n)
        throw DimensionError("ref::enhance_image: image smaller than crop size");

    const GrayImage gray = to_gray(img);
    const ResidualImage res = ref::residual(gray);
    const CropSet crops = sample_crops(res.width, res.height, n, l, seed);
    return ref::accumulate_spectrum(res, crops, epsilon);
}

} // namespace specdet::ref
