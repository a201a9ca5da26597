#include "skewguard/metrics.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "skewguard/csv.hpp"
#include "skewguard/error.hpp"

namespace skewguard {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_inputs(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size())
        raise(Errc::LengthMismatch, std::to_string(scores.size()) + " scores vs " +
                                        std::to_string(labels.size()) + " labels");
    for (int v : labels)
        if (v != 0 && v != 1) raise(Errc::NonBinaryLabel, "labels must be 0 or 1");
}

// indices sorted by score descending, ties by index; plus class totals
struct Ranked {
    std::vector<std::size_t> order;
    std::size_t positives = 0;
    std::size_t negatives = 0;
};

Ranked rank_by_score(std::span<const double> scores, std::span<const int> labels) {
    Ranked r;
    r.order.resize(scores.size());
    std::iota(r.order.begin(), r.order.end(), 0);
    std::sort(r.order.begin(), r.order.end(), [&](std::size_t a, std::size_t b) {
        return scores[a] != scores[b] ? scores[a] > scores[b] : a < b;
    });
    for (int v : labels) (v ? r.positives : r.negatives) += 1;
    return r;
}

}  // namespace

ConfusionMatrix confusion(std::span<const double> scores, std::span<const int> labels,
                          double cutoff) {
    check_inputs(scores, labels);
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const bool predicted = scores[i] >= cutoff;
        if (labels[i] == 1)
            (predicted ? cm.tp : cm.fn) += 1;
        else
            (predicted ? cm.fp : cm.tn) += 1;
    }
    return cm;
}

SummaryStats summary_stats(const ConfusionMatrix& cm) {
    const std::size_t total = cm.total();
    if (total == 0) raise(Errc::InvalidArgument, "empty confusion matrix");
    SummaryStats s{};
    s.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(total);
    s.error_rate = 1.0 - s.accuracy;
    s.precision = (cm.tp + cm.fp) ? static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fp)
                                  : kNaN;
    s.recall = (cm.tp + cm.fn) ? static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn)
                               : kNaN;
    s.f1 = (s.precision + s.recall > 0.0 && s.precision == s.precision && s.recall == s.recall)
               ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
               : kNaN;
    return s;
}

CurveReport roc_auc(std::span<const double> scores, std::span<const int> labels) {
    check_inputs(scores, labels);
    const Ranked r = rank_by_score(scores, labels);
    if (r.positives == 0 || r.negatives == 0)
        raise(Errc::OneClassOnly, "ROC needs both classes present");

    CurveReport report;
    report.kind = CurveKind::Roc;
    report.points.emplace_back(0.0, 0.0);

    const double np = static_cast<double>(r.positives);
    const double nn = static_cast<double>(r.negatives);
    std::size_t tp = 0, fp = 0;
    double area = 0.0, prev_x = 0.0, prev_y = 0.0;
    std::size_t i = 0;
    while (i < r.order.size()) {
        // all observations tied at this score enter together
        std::size_t j = i;
        while (j < r.order.size() && scores[r.order[j]] == scores[r.order[i]]) {
            (labels[r.order[j]] ? tp : fp) += 1;
            ++j;
        }
        i = j;
        const double x = static_cast<double>(fp) / nn;
        const double y = static_cast<double>(tp) / np;
        area += (x - prev_x) * (y + prev_y) * 0.5;
        report.points.emplace_back(x, y);
        prev_x = x;
        prev_y = y;
    }
    report.area = area;
    return report;
}

CurveReport pr_auprc(std::span<const double> scores, std::span<const int> labels) {
    check_inputs(scores, labels);
    const Ranked r = rank_by_score(scores, labels);
    if (r.positives == 0) raise(Errc::NoPositives, "PR curve needs at least one positive");

    CurveReport report;
    report.kind = CurveKind::Pr;
    const double np = static_cast<double>(r.positives);
    std::size_t tp = 0, fp = 0;
    double area = 0.0, prev_recall = 0.0;
    std::size_t i = 0;
    bool first_group = true;
    while (i < r.order.size()) {
        std::size_t j = i;
        while (j < r.order.size() && scores[r.order[j]] == scores[r.order[i]]) {
            (labels[r.order[j]] ? tp : fp) += 1;
            ++j;
        }
        i = j;
        const double recall = static_cast<double>(tp) / np;
        const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
        if (first_group) {
            report.points.emplace_back(0.0, precision);  // anchor the recall axis
            first_group = false;
        }
        area += (recall - prev_recall) * precision;
        report.points.emplace_back(recall, precision);
        prev_recall = recall;
    }
    report.area = area;
    return report;
}

void write_curve_csv(const CurveReport& report, const std::filesystem::path& path) {
    std::string out = "# kind=";
    out += (report.kind == CurveKind::Roc ? "roc" : "pr");
    out += " area=" + format_double(report.area) + "\n";
    for (const auto& [x, y] : report.points)
        out += format_double(x) + "," + format_double(y) + "\n";
    write_file_atomic(path, out);
}

}  // namespace skewguard
