#include "skewguard/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace skewguard {

std::size_t Dataset::count_label(int label) const {
    return static_cast<std::size_t>(std::count(y.begin(), y.end(), label));
}

std::vector<std::size_t> Dataset::rows_with_label(int label) const {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < y.size(); ++i)
        if (y[i] == label) idx.push_back(i);
    return idx;
}

Matrix Dataset::submatrix_for_label(int label) const {
    const auto idx = rows_with_label(label);
    return X.select_rows(idx);
}

Dataset Dataset::select_rows(std::span<const std::size_t> idx) const {
    Dataset out;
    out.X = X.select_rows(idx);
    out.feature_names = feature_names;
    out.cat_names = cat_names;
    out.cat_dicts = cat_dicts;
    out.label_name = label_name;
    out.y.reserve(idx.size());
    for (auto i : idx) out.y.push_back(y[i]);
    out.cat_codes.resize(cat_codes.size());
    for (std::size_t c = 0; c < cat_codes.size(); ++c) {
        out.cat_codes[c].reserve(idx.size());
        for (auto i : idx) out.cat_codes[c].push_back(cat_codes[c][i]);
    }
    if (!synthetic.empty()) {
        out.synthetic.reserve(idx.size());
        for (auto i : idx) out.synthetic.push_back(synthetic[i]);
    }
    return out;
}

bool Dataset::value_equal(const Dataset& other) const {
    if (!(X == other.X && y == other.y && feature_names == other.feature_names &&
          cat_names == other.cat_names && label_name == other.label_name))
        return false;
    // categorical equality is on decoded values; code numbering may differ
    if (cat_codes.size() != other.cat_codes.size()) return false;
    for (std::size_t c = 0; c < cat_codes.size(); ++c) {
        if (cat_codes[c].size() != other.cat_codes[c].size()) return false;
        for (std::size_t i = 0; i < cat_codes[c].size(); ++i)
            if (cat_dicts[c][cat_codes[c][i]] != other.cat_dicts[c][other.cat_codes[c][i]])
                return false;
    }
    return true;
}

void check_minority_labeling(const Dataset& d) {
    const std::size_t n1 = d.count_label(1);
    const std::size_t n0 = d.count_label(0);
    if (n1 == 0 || n0 == 0)
        raise(Errc::InvalidLabeling, "both classes must be present");
    if (n1 > n0)
        raise(Errc::InvalidLabeling, "label 1 must be the minority class (" +
                                         std::to_string(n1) + " > " + std::to_string(n0) + ")");
}

double median(std::vector<double> values) {
    const std::size_t n = values.size();
    if (n == 0) raise(Errc::InvalidArgument, "median of empty range");
    std::sort(values.begin(), values.end());
    return (n % 2 == 1) ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double mad(std::span<const double> values) {
    std::vector<double> v(values.begin(), values.end());
    const double med = median(v);
    for (auto& x : v) x = std::abs(x - med);
    return median(std::move(v));
}

namespace {
constexpr double kMadConsistency = 1.4826;
}

ScalingSpec fit_scaling(const Dataset& d, ScalingMode mode) {
    const std::size_t n = d.n(), p = d.p();
    ScalingSpec s;
    s.mode = mode;
    s.center.assign(p, 0.0);
    s.scale.assign(p, 1.0);
    if (mode == ScalingMode::None) return s;
    if (n < 2) raise(Errc::TooFewRows, "scaling needs at least 2 rows");

    for (std::size_t j = 0; j < p; ++j) {
        std::vector<double> col(n);
        for (std::size_t i = 0; i < n; ++i) col[i] = d.X(i, j);
        if (mode == ScalingMode::Standard) {
            double mean = 0.0;
            for (double v : col) mean += v;
            mean /= static_cast<double>(n);
            double ss = 0.0;
            for (double v : col) ss += (v - mean) * (v - mean);
            const double sd = std::sqrt(ss / static_cast<double>(n - 1));
            if (sd == 0.0)
                raise(Errc::ZeroScaleColumn, "constant column '" + d.feature_names[j] + "'");
            s.center[j] = mean;
            s.scale[j] = sd;
        } else {
            const double med = median(col);
            const double m = mad(col) * kMadConsistency;
            if (m == 0.0)
                raise(Errc::ZeroScaleColumn,
                      "zero MAD in column '" + d.feature_names[j] + "'");
            s.center[j] = med;
            s.scale[j] = m;
        }
    }
    return s;
}

namespace {

Dataset transform(const Dataset& d, const ScalingSpec& s, bool invert) {
    if (s.center.size() != d.p() || s.scale.size() != d.p())
        raise(Errc::DimensionMismatch, "scaling spec column count does not match dataset");
    Dataset out = d;
    if (s.mode == ScalingMode::None) return out;
    for (std::size_t i = 0; i < d.n(); ++i)
        for (std::size_t j = 0; j < d.p(); ++j)
            out.X(i, j) = invert ? d.X(i, j) * s.scale[j] + s.center[j]
                                 : (d.X(i, j) - s.center[j]) / s.scale[j];
    return out;
}

}  // namespace

Dataset apply_scaling(const Dataset& d, const ScalingSpec& s) { return transform(d, s, false); }
Dataset invert_scaling(const Dataset& d, const ScalingSpec& s) { return transform(d, s, true); }

}  // namespace skewguard
