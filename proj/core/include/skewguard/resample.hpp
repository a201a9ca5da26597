#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "skewguard/dataset.hpp"
#include "skewguard/mcd.hpp"
#include "skewguard/rng.hpp"

namespace skewguard {

enum class Method { Smote, Rose, RobRose };

Method method_from_string(const std::string& name);
const char* method_name(Method m);

struct OversampleConfig {
    double target = 10.0;       // m: desired minority size as a multiple of n1
    double shrink = 0.5;        // kernel tuning constant h
    double cutoff_prob = 0.999; // outlier cutoff probability
    int k_neighbors = 5;        // SMOTE neighbour count
    std::uint64_t seed = 0;     // stream key used by callers that own no stream
    bool smoothing_n_total = false;  // use total n instead of n1 in the kernel constant
    FastMcdOptions mcd;

    void validate() const;
};

/// Synthetic minority rows plus provenance. `seeds` and `excluded` hold row
/// indices into the ORIGINAL dataset (both always label-1 rows); for robROSE
/// they are disjoint by construction.
struct OversampleResult {
    Matrix Z;                                 // synthetic numeric rows
    std::vector<std::vector<int>> cat_codes;  // inherited categorical codes per column
    std::vector<std::size_t> seeds;           // generating minority row per synthetic row
    std::vector<std::size_t> excluded;        // minority rows flagged as outliers
    bool fell_back_to_rose = false;           // robROSE degraded: minority too small for MCD
    bool duplicated_single = false;           // single minority row: plain duplication
};

/// Index set I of non-outlying minority rows: { i : MD²(xᵢ) < χ²_{p,cutoff} }.
/// Indices are local to x_minority. Throws EmptyInlierSet when all rows are
/// flagged.
std::vector<std::size_t> flag_outliers(const Matrix& x_minority, const RobustFit& fit,
                                       double cutoff_prob);

/// Gaussian-kernel smoothing constant (4/((p+2)·n))^(1/(p+4)).
double smoothing_constant(std::size_t p, double n);

/// robROSE: MCD fit on the minority rows, outlier exclusion at the
/// chi-square cutoff, then synthetic draws z ~ N(x_j, H²·S) where S is the
/// robust minority scatter, H = h·c, and seed rows j are picked uniformly
/// among the non-outliers. Categorical values are inherited from the seed
/// row. Falls back to plain ROSE (flagged, empty exclusion set) when the
/// minority class is too small for the MCD.
///
/// Stream layout (part of the reproducibility contract): the MCD search
/// consumes substream 0 of the passed stream, the kernel draws substream 1.
OversampleResult rob_rose(const Dataset& train, const OversampleConfig& cfg, RngStream& rng);

/// ROSE: no outlier exclusion, diagonal kernel with per-column bandwidth
/// H_d = h·c·sd_d.
OversampleResult rose(const Dataset& train, const OversampleConfig& cfg, RngStream& rng);

/// SMOTE: z = x + α(y−x) toward one of the k nearest minority neighbours
/// (Euclidean distance on the numeric features, ties toward lower row index).
OversampleResult smote(const Dataset& train, const OversampleConfig& cfg, RngStream& rng);

OversampleResult oversample(const Dataset& train, Method method, const OversampleConfig& cfg,
                            RngStream& rng);

/// Original rows first (order preserved), synthetic rows appended with
/// label 1 and the synthetic flag set.
Dataset append_synthetic(const Dataset& train, const OversampleResult& result);

/// oversample + append_synthetic; the resulting minority size is m·n₁.
Dataset rebalance(const Dataset& train, Method method, const OversampleConfig& cfg,
                  RngStream& rng);

}  // namespace skewguard
