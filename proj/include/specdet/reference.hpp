#pragma once

#include "specdet/enhance.hpp"

// Serial reference implementations of the enhancement kernels. These stay
// deliberately naive (full sort per window, quadruple-loop DFT) and share no
// code with the OpenMP kernels in specdet::, so the unit and acceptance
// suites can use them as independent oracles. The benchmark target compares
// both paths.
namespace specdet::ref {

// Gathers the 25 replicate-padded neighbors, sorts them, takes index 12.
GrayImage median_filter_5x5(const GrayImage& img);

ResidualImage residual(const GrayImage& img);

// Literal definition: F[u,v] = sum_{x,y} tile[x*n+y] e^{-2 pi i (ux+vy)/n},
// evaluated term by term with the exponent reduced mod n.
std::vector<std::complex<double>> dft2d(const std::vector<double>& tile, int n);

EnhancedSpectrum accumulate_spectrum(const ResidualImage& res, const CropSet& crops,
                                     double epsilon = kDefaultEpsilon);

EnhancedSpectrum enhance_image(const Image& img, int n, int l, std::uint64_t seed,
                               double epsilon = kDefaultEpsilon);

} // namespace specdet::ref
