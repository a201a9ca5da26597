#pragma once

#include <span>
#include <vector>

#include "skewguard/matrix.hpp"

namespace skewguard {

struct LogitModel {
    double intercept = 0.0;
    std::vector<double> coefficients;
    bool converged = false;
    bool separation = false;  // perfect separation: best iterate returned
    int iterations = 0;
    double log_likelihood = 0.0;
    std::vector<double> ll_trace;  // accepted log-likelihood after each iteration
};

struct LogitOptions {
    int max_iter = 100;
    double tol = 1e-8;    // max absolute parameter change
    double ridge = 0.0;   // optional L2 penalty on coefficients (not intercept)
};

/// Binary logistic regression by iteratively reweighted least squares with
/// step-halving on any likelihood decrease. On perfect separation the best
/// iterate is returned with converged = false and separation = true; a
/// singular information matrix without separation raises
/// SingularInformation.
LogitModel fit_logit(const Matrix& x, const std::vector<int>& y, const LogitOptions& options = {});

/// σ(intercept + X·coefficients) rowwise; values clamped to the open (0,1).
std::vector<double> predict_proba(const LogitModel& model, const Matrix& x);

/// Binomial log-likelihood of labels under scores from the linear predictor.
double logit_log_likelihood(const Matrix& x, const std::vector<int>& y, double intercept,
                            std::span<const double> coefficients);

}  // namespace skewguard
