#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "skewguard/matrix.hpp"

namespace skewguard {

/// Binary-labeled dataset: an n×p numeric matrix, optional dictionary-encoded
/// categorical columns, and 0/1 labels (1 = minority/fraud). Immutable by
/// convention after construction; operations return new datasets.
struct Dataset {
    Matrix X;                                        // n×p numeric features
    std::vector<int> y;                              // n labels in {0,1}
    std::vector<std::string> feature_names;          // p
    std::vector<std::string> cat_names;              // q
    std::vector<std::vector<int>> cat_codes;         // q columns of n codes
    std::vector<std::vector<std::string>> cat_dicts; // q dictionaries
    std::vector<std::uint8_t> synthetic;             // n flags; empty = all real
    std::string label_name = "class";

    std::size_t n() const { return y.size(); }
    std::size_t p() const { return X.cols(); }
    std::size_t q() const { return cat_names.size(); }

    std::size_t count_label(int label) const;
    std::vector<std::size_t> rows_with_label(int label) const;
    bool has_both_classes() const { return count_label(0) > 0 && count_label(1) > 0; }

    /// Rows of X whose label is `label`, in original order.
    Matrix submatrix_for_label(int label) const;

    Dataset select_rows(std::span<const std::size_t> idx) const;

    bool value_equal(const Dataset& other) const;
};

/// Raises InvalidLabeling unless label 1 is the (weak) minority and both
/// classes are present. Called where oversampling starts, not on every fit:
/// a rebalanced training set legitimately inverts the counts.
void check_minority_labeling(const Dataset& d);

enum class ScalingMode { None, Standard, Robust };

struct ScalingSpec {
    ScalingMode mode = ScalingMode::None;
    std::vector<double> center;  // per numeric column
    std::vector<double> scale;   // per numeric column, > 0
};

/// Standard mode: mean / sample standard deviation. Robust mode: median /
/// MAD·1.4826 (consistency factor for the normal model).
/// Throws ZeroScaleColumn on a constant column.
ScalingSpec fit_scaling(const Dataset& d, ScalingMode mode);

/// Columnwise (x - center)/scale on the numeric block; categorical columns
/// and labels untouched.
Dataset apply_scaling(const Dataset& d, const ScalingSpec& s);

/// Inverse of apply_scaling: x·scale + center.
Dataset invert_scaling(const Dataset& d, const ScalingSpec& s);

double median(std::vector<double> values);
double mad(std::span<const double> values);

}  // namespace skewguard
