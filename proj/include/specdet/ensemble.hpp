#pragma once

#include <cmath>

#include "specdet/errors.hpp"

namespace specdet {

// Scores from the pixel-domain detector (r_i) and the spectrum detector
// (r_f), both probabilities.
struct ScorePair {
    double r_i = 0.5;
    double r_f = 0.5;
};

// Keep whichever score is more confident, i.e. farther from 0.5. On an
// exact margin tie the mean is returned, which preserves [0, 1] and agrees
// with both branches when the scores coincide.
inline double combine(const ScorePair& p) {
    if (p.r_i < 0.0 || p.r_i > 1.0 || p.r_f < 0.0 || p.r_f > 1.0)
        throw DomainError("combine: scores must lie in [0, 1]");

    const double margin_i = std::abs(p.r_i - 0.5);
    const double margin_f = std::abs(p.r_f - 0.5);
    if (margin_i > margin_f)
        return p.r_i;
    if (margin_i < margin_f)
        return p.r_f;
    return 0.5 * (p.r_i + p.r_f);
}

} // namespace specdet
