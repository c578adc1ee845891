#pragma once

#include <string>
#include <utility>
#include <vector>

#include "specdet/errors.hpp"

namespace specdet {

// label: 0 = camera/real, 1 = CNN-generated.
struct ScoredLabel {
    double score = 0.0;
    int label = 0;
};

struct Confusion {
    long tp = 0;
    long fp = 0;
    long tn = 0;
    long fn = 0;

    long total() const { return tp + fp + tn + fn; }
    bool operator==(const Confusion&) const = default;
};

struct EvalReport {
    double precision = 0.0;
    double recall = 0.0;
    double f_score = 0.0;
    double ap = 0.0;
    double threshold = 0.5;
    Confusion counts;
    std::vector<std::pair<double, double>> pr_points; // (recall, precision)
};

// Positive decision is strict: score > th.
Confusion confusion_at(const std::vector<ScoredLabel>& data, double th);

struct FScore {
    double precision = 0.0;
    double recall = 0.0;
    double f = 0.0;
};

// P = TP/(TP+FP) (0 when no positive predictions), R = TP/(TP+FN),
// F = 2RP/(R+P) with F = 0 when P+R = 0. Throws when the data has no
// positive labels (recall undefined).
FScore f_score(const std::vector<ScoredLabel>& data, double th);

// Non-interpolated AP: rank by score descending (ties grouped, so the input
// order among equal scores cannot matter), AP = sum_j (R_j - R_{j-1}) P_j
// over distinct-score thresholds. Throws when no positive labels exist.
double average_precision(const std::vector<ScoredLabel>& data);

// Full report at a threshold; pr_points are the per-distinct-score
// (recall, precision) pairs used by the AP sum.
EvalReport evaluate(const std::vector<ScoredLabel>& data, double th = 0.5);

// One line: "precision=... recall=... f=... ap=... th=... tp=... fp=... tn=... fn=..."
std::string format_report(const EvalReport& report);

// "recall,precision" CSV rows for the PR curve.
std::string format_pr_csv(const EvalReport& report);

} // namespace specdet
