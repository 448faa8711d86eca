#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace pdm {

struct ConfusionCounts {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t tn = 0;
    std::int64_t fn = 0;

    std::int64_t positives() const { return tp + fn; }
    std::int64_t negatives() const { return fp + tn; }
    std::int64_t total() const { return tp + fp + tn + fn; }

    friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

/// Throws DataError on length mismatch. Labels are 0/1; anything non-zero
/// counts as 1.
ConfusionCounts confusion(std::span<const int> predicted, std::span<const int> actual);

/// Confusion of `score >= cutoff` against actual labels.
ConfusionCounts confusion_at(std::span<const double> scores, std::span<const int> actual,
                             double cutoff);

/// A ratio whose denominator may vanish. Degenerate ratios carry value 0.
struct Measure {
    double value = 0.0;
    bool degenerate = false;
};

Measure recall(const ConfusionCounts& c);     ///< TP / P
Measure precision(const ConfusionCounts& c);  ///< TP / (TP + FP)
Measure f1(const ConfusionCounts& c);         ///< 2 TP / (TP + FP + P)

struct RocPoint {
    double cutoff = 0.0;  ///< +inf for the (0,0) endpoint
    double fpr = 0.0;
    double tpr = 0.0;
    ConfusionCounts counts;
};

struct RocCurve {
    std::vector<RocPoint> points;  ///< cutoff descending
    double auc = 0.0;
};

/// One point per distinct score (predicting score >= cutoff) plus the (0,0)
/// endpoint; AUC by the trapezoidal rule. Throws DataError unless both
/// classes are present.
RocCurve roc(std::span<const double> scores, std::span<const int> actual);

}  // namespace pdm
