#include "pdm/metrics.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "pdm/error.hpp"

namespace pdm {

namespace {

Measure ratio(double num, double den) {
    if (den == 0.0) return {0.0, true};
    return {num / den, false};
}

void check_lengths(std::size_t a, std::size_t b) {
    if (a != b) {
        throw DataError("length mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
    }
}

}  // namespace

ConfusionCounts confusion(std::span<const int> predicted, std::span<const int> actual) {
    check_lengths(predicted.size(), actual.size());
    ConfusionCounts c;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const bool p = predicted[i] != 0;
        const bool a = actual[i] != 0;
        if (p && a) ++c.tp;
        else if (p) ++c.fp;
        else if (a) ++c.fn;
        else ++c.tn;
    }
    return c;
}

ConfusionCounts confusion_at(std::span<const double> scores, std::span<const int> actual,
                             double cutoff) {
    check_lengths(scores.size(), actual.size());
    ConfusionCounts c;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const bool p = scores[i] >= cutoff;
        const bool a = actual[i] != 0;
        if (p && a) ++c.tp;
        else if (p) ++c.fp;
        else if (a) ++c.fn;
        else ++c.tn;
    }
    return c;
}

Measure recall(const ConfusionCounts& c) {
    return ratio(static_cast<double>(c.tp), static_cast<double>(c.positives()));
}

Measure precision(const ConfusionCounts& c) {
    return ratio(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fp));
}

Measure f1(const ConfusionCounts& c) {
    return ratio(2.0 * static_cast<double>(c.tp),
                 static_cast<double>(c.tp + c.fp + c.positives()));
}

RocCurve roc(std::span<const double> scores, std::span<const int> actual) {
    check_lengths(scores.size(), actual.size());
    std::int64_t pos = 0;
    for (int a : actual) pos += a != 0;
    const std::int64_t neg = static_cast<std::int64_t>(actual.size()) - pos;
    if (pos == 0 || neg == 0) throw DataError("ROC needs both classes present");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    RocCurve curve;
    ConfusionCounts c{0, 0, neg, pos};
    curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0, c});
    const auto P = static_cast<double>(pos);
    const auto N = static_cast<double>(neg);

    // Twice the area in count units; integer so the AUC is exact up to one division.
    std::int64_t area2 = 0;
    for (std::size_t i = 0; i < order.size();) {
        const double s = scores[order[i]];
        for (; i < order.size() && scores[order[i]] == s; ++i) {
            if (actual[order[i]] != 0) {
                ++c.tp;
                --c.fn;
            } else {
                ++c.fp;
                --c.tn;
            }
        }
        const ConfusionCounts& prev = curve.points.back().counts;
        area2 += (c.fp - prev.fp) * (c.tp + prev.tp);
        curve.points.push_back(
            {s, static_cast<double>(c.fp) / N, static_cast<double>(c.tp) / P, c});
    }
    curve.auc = static_cast<double>(area2) / (2.0 * P * N);
    return curve;
}

}  // namespace pdm
