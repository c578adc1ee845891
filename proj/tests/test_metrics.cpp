#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "specdet/metrics.hpp"
#include "specdet/rng.hpp"

using namespace specdet;

namespace {

// Exhaustive oracle: evaluate (R_j, P_j) at every distinct score,
// predicting positive for score >= that value, and sum the weighted
// precisions directly. O(n^2), no sharing with the library walk.
double ap_sweep_oracle(const std::vector<ScoredLabel>& data) {
    long npos = 0;
    for (const auto& d : data)
        npos += d.label == 1;
    REQUIRE(npos > 0);

    std::set<double, std::greater<>> thresholds;
    for (const auto& d : data)
        thresholds.insert(d.score);

    double ap = 0.0, prev_recall = 0.0;
    for (double t : thresholds) {
        long tp = 0, fp = 0;
        for (const auto& d : data) {
            if (d.score >= t)
                (d.label == 1 ? tp : fp)++;
        }
        const double recall = static_cast<double>(tp) / npos;
        const double precision = static_cast<double>(tp) / (tp + fp);
        ap += (recall - prev_recall) * precision;
        prev_recall = recall;
    }
    return ap;
}

std::vector<ScoredLabel> random_scored(SplitMix64& rng, int n, bool quantize_scores) {
    std::vector<ScoredLabel> data(n);
    bool any_pos = false;
    for (auto& d : data) {
        // quantized scores force duplicate values
        d.score = quantize_scores ? static_cast<double>(rng.next_below(10)) / 10.0
                                  : rng.next_double();
        d.label = static_cast<int>(rng.next_below(2));
        any_pos |= d.label == 1;
    }
    if (!any_pos)
        data[rng.next_below(data.size())].label = 1;
    return data;
}

} // namespace

TEST_CASE("confusion_at") {
    SUBCASE("perfect separation") {
        const Confusion c = confusion_at({{0.9, 1}, {0.1, 0}}, 0.5);
        CHECK(c == Confusion{1, 0, 1, 0});
    }
    SUBCASE("boundary score is not positive (strict >)") {
        const Confusion c = confusion_at({{0.5, 1}}, 0.5);
        CHECK(c == Confusion{0, 0, 0, 1});
    }
    SUBCASE("matches an independent recount and sums to n") {
        SplitMix64 rng(1);
        const auto data = random_scored(rng, 200, false);
        const double th = 0.37;
        const Confusion c = confusion_at(data, th);
        long tp = 0, fp = 0, tn = 0, fn = 0;
        for (const auto& d : data) {
            if (d.label == 1 && d.score > th)
                ++tp;
            if (d.label == 0 && d.score > th)
                ++fp;
            if (d.label == 0 && d.score <= th)
                ++tn;
            if (d.label == 1 && d.score <= th)
                ++fn;
        }
        CHECK(c == Confusion{tp, fp, tn, fn});
        CHECK(c.total() == 200);
    }
}

TEST_CASE("f_score") {
    SUBCASE("perfect classifier") {
        const FScore s = f_score({{0.9, 1}, {0.8, 1}, {0.1, 0}, {0.2, 0}}, 0.5);
        CHECK(s.precision == 1.0);
        CHECK(s.recall == 1.0);
        CHECK(s.f == 1.0);
    }
    SUBCASE("TP=2 FP=1 FN=1 gives two thirds everywhere") {
        const FScore s = f_score({{0.9, 1}, {0.8, 1}, {0.7, 0}, {0.2, 1}}, 0.5);
        CHECK(s.precision == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
        CHECK(s.recall == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
        CHECK(s.f == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    }
    SUBCASE("all scores below threshold guard") {
        const FScore s = f_score({{0.1, 1}, {0.2, 0}}, 0.5);
        CHECK(s.precision == 0.0);
        CHECK(s.recall == 0.0);
        CHECK(s.f == 0.0);
    }
    SUBCASE("no positive labels is an error") {
        CHECK_THROWS_AS(f_score({{0.9, 0}, {0.1, 0}}, 0.5), DomainError);
    }
}

TEST_CASE("average_precision examples") {
    CHECK(average_precision({{0.9, 1}, {0.8, 1}, {0.3, 0}}) == 1.0);
    CHECK(average_precision({{0.9, 0}, {0.1, 1}}) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK_THROWS_AS(average_precision({{0.9, 0}}), DomainError);
}

TEST_CASE("average_precision matches the threshold-sweep oracle") {
    SplitMix64 rng(345);
    for (int iter = 0; iter < 200; ++iter) {
        const int n = 1 + static_cast<int>(rng.next_below(500));
        const auto data = random_scored(rng, n, iter % 2 == 0);
        const double got = average_precision(data);
        const double want = ap_sweep_oracle(data);
        CHECK(std::abs(got - want) <= 1e-12);
        CHECK(got >= 0.0);
        CHECK(got <= 1.0);
    }
}

TEST_CASE("average_precision is invariant under monotone score transforms") {
    SplitMix64 rng(8);
    const auto data = random_scored(rng, 120, true);
    auto transformed = data;
    for (auto& d : transformed)
        d.score = d.score * 0.5 + 0.25; // strictly increasing, stays in [0,1]
    CHECK(average_precision(data) == doctest::Approx(average_precision(transformed)).epsilon(1e-12));
}

TEST_CASE("average_precision ignores the input order among ties") {
    SplitMix64 rng(99);
    auto data = random_scored(rng, 150, true);
    const double before = average_precision(data);
    // deterministic shuffle
    for (std::size_t i = data.size() - 1; i > 0; --i)
        std::swap(data[i], data[rng.next_below(i + 1)]);
    CHECK(average_precision(data) == before);
}

TEST_CASE("AP is 1 exactly when every positive outranks every negative") {
    CHECK(average_precision({{0.9, 1}, {0.7, 1}, {0.5, 0}, {0.1, 0}}) == 1.0);
    // a positive tied with a negative cannot reach 1
    CHECK(average_precision({{0.9, 1}, {0.9, 0}}) < 1.0);
    // an inverted pair cannot reach 1
    CHECK(average_precision({{0.4, 1}, {0.6, 0}}) < 1.0);
}

TEST_CASE("evaluate assembles the report and the PR curve") {
    const std::vector<ScoredLabel> data = {{0.9, 1}, {0.8, 1}, {0.7, 0}, {0.2, 1}};
    const EvalReport report = evaluate(data, 0.5);
    CHECK(report.counts == Confusion{2, 1, 0, 1});
    CHECK(report.precision == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(report.ap == doctest::Approx(ap_sweep_oracle(data)).epsilon(1e-12));
    CHECK(report.pr_points.size() == 4); // four distinct scores

    const std::string line = format_report(report);
    CHECK(line ==
          "precision=0.666667 recall=0.666667 f=0.666667 ap=0.916667 th=0.500000 "
          "tp=2 fp=1 tn=0 fn=1");

    const std::string csv = format_pr_csv(report);
    CHECK(csv.substr(0, 17) == "recall,precision\n");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
}
