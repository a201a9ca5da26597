#pragma once

#include <span>
#include <vector>

#include "skewguard/matrix.hpp"
#include "skewguard/rng.hpp"

namespace skewguard {

/// Lower-triangular Cholesky factor L with m = L·Lᵀ.
/// Throws NotPositiveDefinite when a pivot falls at or below
/// dim · machine-epsilon · max-diagonal.
Matrix cholesky(const SymMatrix& m);

/// Forward substitution: solves L·x = b for lower-triangular L.
/// Throws SingularMatrix on a zero pivot.
std::vector<double> solve_lower(const Matrix& lower, std::span<const double> b);

/// One draw from N(center, L·Lᵀ): returns center + L·u with u i.i.d.
/// standard normals taken from the stream.
std::vector<double> mvn_sample(std::span<const double> center, const Matrix& scatter_chol,
                               RngStream& rng);

/// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);

double chi2_cdf(double x, unsigned df);
double chi2_pdf(double x, unsigned df);

/// Inverse chi-square CDF via Newton iterations safeguarded by bisection on
/// the regularized incomplete gamma; |CDF(q) - prob| <= 1e-12 at the result.
/// Throws InvalidProbability for prob outside (0,1).
double chi2_quantile(unsigned df, double prob);

// small vector helpers shared by the estimation modules
double dot(std::span<const double> a, std::span<const double> b);
std::vector<double> column_means(const Matrix& x);
SymMatrix sample_covariance(const Matrix& x, std::span<const double> mean);

}  // namespace skewguard
