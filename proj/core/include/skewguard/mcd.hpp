#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "skewguard/matrix.hpp"
#include "skewguard/rng.hpp"

namespace skewguard {

/// Robust multivariate location/scatter from the minimum covariance
/// determinant: the h-subset of rows whose sample covariance has the
/// smallest determinant, found by the FastMCD search (random elemental
/// starts, C-step refinement, reweighting).
struct RobustFit {
    std::vector<double> center;       // robust location
    SymMatrix scatter;                // robust scatter, consistency-corrected
    std::size_t h = 0;                // subset size used by the raw estimate
    std::vector<std::size_t> subset;  // the h retained row indices, ascending
    double raw_determinant = 0.0;     // det of the subset sample covariance
};

struct CStepResult {
    std::vector<double> center;
    SymMatrix scatter;
    std::vector<std::size_t> subset;  // ascending
    double log_det = 0.0;
    bool degenerate = false;  // subset covariance was singular; scatter left regularized
};

/// One concentration step: rank all rows by squared Mahalanobis distance to
/// (center, scatter), keep the h closest, recompute mean and sample
/// covariance. The determinant never increases across successive steps.
/// Distance ties break toward the lower row index.
CStepResult c_step(const Matrix& x, std::span<const double> center, const SymMatrix& scatter,
                   std::size_t h);

struct FastMcdOptions {
    double alpha = 0.5;           // trimming level; 0.5 = maximal breakdown
    int n_starts = 500;           // random (p+1)-point elemental starts
    int keep_best = 10;           // candidates carried into full iteration
    int prelim_csteps = 2;        // C-steps applied to every start
    int max_csteps = 200;         // cap on the convergence loop
    bool exhaustive_starts = false;  // enumerate every (p+1)-subset instead
    bool reweight = true;         // chi2(p, 0.975) reweighting step
};

/// Subset size for the trimming level: floor((n+p+1)/2) at alpha = 0.5,
/// interpolating linearly up to n at alpha = 1.
std::size_t mcd_subset_size(std::size_t n, std::size_t p, double alpha);

/// Factor making the trimmed scatter consistent for the covariance at the
/// normal model: coverage / P(chi2_{p+2} <= chi2_{p, coverage}).
double mcd_consistency_factor(std::size_t p, double coverage);

/// FastMCD. Requires n >= 2(p+1) (TooFewRows otherwise) and data not
/// concentrated on a hyperplane (SingularData). Deterministic given the
/// stream: each start draws from its own substream, ties in the final
/// reduction break toward the earliest start.
RobustFit fast_mcd(const Matrix& x, const FastMcdOptions& options, RngStream& rng);

/// (x - center)ᵀ Σ⁻¹ (x - center) via Cholesky solve; never negative.
double mahalanobis_sq(std::span<const double> x, const RobustFit& fit);

/// Squared robust distances for every row of x against (center, chol(Σ)).
std::vector<double> mahalanobis_sq_rows(const Matrix& x, std::span<const double> center,
                                        const Matrix& scatter_chol);

}  // namespace skewguard
