#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

namespace skewguard {

struct ConfusionMatrix {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    std::size_t total() const { return tp + fp + tn + fn; }
};

/// Ratios with zero denominators come back as NaN, never silently 0.
struct SummaryStats {
    double accuracy;
    double error_rate;
    double precision;
    double recall;
    double f1;
};

enum class CurveKind { Roc, Pr };

struct CurveReport {
    CurveKind kind = CurveKind::Roc;
    std::vector<std::pair<double, double>> points;  // (FPR,TPR) or (recall,precision)
    double area = 0.0;
};

/// Predicted positive iff score >= cutoff (inclusive, by contract).
ConfusionMatrix confusion(std::span<const double> scores, std::span<const int> labels,
                          double cutoff);

SummaryStats summary_stats(const ConfusionMatrix& cm);

/// ROC curve over all distinct score cutoffs, area by the trapezoid rule.
/// Ties enter at the same cutoff, so the area equals the Mann-Whitney
/// statistic with ties counted 1/2.
CurveReport roc_auc(std::span<const double> scores, std::span<const int> labels);

/// Precision-recall curve over all distinct cutoffs descending; area is
/// average precision (step integration: Σ precision·Δrecall), not the
/// trapezoid rule, which is known to overestimate for PR curves.
CurveReport pr_auprc(std::span<const double> scores, std::span<const int> labels);

/// One `# kind=<roc|pr> area=<value>` header line, then x,y rows.
void write_curve_csv(const CurveReport& report, const std::filesystem::path& path);

}  // namespace skewguard
