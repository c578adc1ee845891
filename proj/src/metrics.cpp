#include "specdet/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

namespace specdet {

Confusion confusion_at(const std::vector<ScoredLabel>& data, double th) {
    Confusion c;
    for (const auto& item : data) {
        const bool predicted = item.score > th;
        if (item.label == 1)
            predicted ? ++c.tp : ++c.fn;
        else
            predicted ? ++c.fp : ++c.tn;
    }
    return c;
}

FScore f_score(const std::vector<ScoredLabel>& data, double th) {
    const Confusion c = confusion_at(data, th);
    if (c.tp + c.fn == 0)
        throw DomainError("f_score: no positive labels, recall undefined");

    FScore s;
    s.precision = (c.tp + c.fp) > 0 ? static_cast<double>(c.tp) / (c.tp + c.fp) : 0.0;
    s.recall = static_cast<double>(c.tp) / (c.tp + c.fn);
    s.f = (s.precision + s.recall) > 0.0
              ? 2.0 * s.recall * s.precision / (s.recall + s.precision)
              : 0.0;
    return s;
}

namespace {

// Ranked walk shared by AP and the PR curve. Emits one (recall, precision)
// point per distinct score, evaluated after consuming all items tied at
// that score.
std::vector<std::pair<double, double>> pr_walk(const std::vector<ScoredLabel>& data,
                                               long positives) {
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return data[a].score > data[b].score;
    });

    std::vector<std::pair<double, double>> points;
    long tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double group_score = data[order[i]].score;
        for (; i < order.size() && data[order[i]].score == group_score; ++i) {
            if (data[order[i]].label == 1)
                ++tp;
            else
                ++fp;
        }
        points.emplace_back(static_cast<double>(tp) / positives,
                            static_cast<double>(tp) / (tp + fp));
    }
    return points;
}

long count_positives(const std::vector<ScoredLabel>& data) {
    long positives = 0;
    for (const auto& item : data)
        positives += item.label == 1;
    return positives;
}

} // namespace

double average_precision(const std::vector<ScoredLabel>& data) {
    const long positives = count_positives(data);
    if (positives == 0)
        throw DomainError("average_precision: no positive labels");

    double ap = 0.0;
    double prev_recall = 0.0;
    for (const auto& [recall, precision] : pr_walk(data, positives)) {
        ap += (recall - prev_recall) * precision;
        prev_recall = recall;
    }
    return ap;
}

EvalReport evaluate(const std::vector<ScoredLabel>& data, double th) {
    const long positives = count_positives(data);
    if (positives == 0)
        throw DomainError("evaluate: no positive labels");

    EvalReport report;
    report.threshold = th;
    report.counts = confusion_at(data, th);
    const FScore s = f_score(data, th);
    report.precision = s.precision;
    report.recall = s.recall;
    report.f_score = s.f;
    report.pr_points = pr_walk(data, positives);

    double ap = 0.0, prev_recall = 0.0;
    for (const auto& [recall, precision] : report.pr_points) {
        ap += (recall - prev_recall) * precision;
        prev_recall = recall;
    }
    report.ap = ap;
    return report;
}

std::string format_report(const EvalReport& report) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "precision=%.6f recall=%.6f f=%.6f ap=%.6f th=%.6f "
                  "tp=%ld fp=%ld tn=%ld fn=%ld",
                  report.precision, report.recall, report.f_score, report.ap,
                  report.threshold, report.counts.tp, report.counts.fp, report.counts.tn,
                  report.counts.fn);
    return buf;
}

std::string format_pr_csv(const EvalReport& report) {
    std::string out = "recall,precision\n";
    char buf[64];
    for (const auto& [recall, precision] : report.pr_points) {
        std::snprintf(buf, sizeof buf, "%.6f,%.6f\n", recall, precision);
        out += buf;
    }
    return out;
}

} // namespace specdet
