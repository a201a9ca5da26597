#include "skewguard/logit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "skewguard/numkit.hpp"

namespace skewguard {

namespace {

double sigmoid(double eta) {
    if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
    const double e = std::exp(eta);
    return e / (1.0 + e);
}

// log(1 + e^eta), overflow-safe
double log1pexp(double eta) {
    if (eta > 0.0) return eta + std::log1p(std::exp(-eta));
    return std::log1p(std::exp(eta));
}

std::vector<double> linear_predictor(const Matrix& x, double intercept,
                                     std::span<const double> beta) {
    std::vector<double> eta(x.rows(), intercept);
    for (std::size_t i = 0; i < x.rows(); ++i) eta[i] += dot(x.row(i), beta);
    return eta;
}

// solves A·z = b for symmetric positive definite A via Cholesky
std::vector<double> solve_spd(const SymMatrix& a, std::span<const double> b) {
    const Matrix L = cholesky(a);
    const auto w = solve_lower(L, b);
    // back substitution with Lᵀ
    const std::size_t n = w.size();
    std::vector<double> z(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = w[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= L(k, ii) * z[k];
        z[ii] = s / L(ii, ii);
    }
    return z;
}

}  // namespace

double logit_log_likelihood(const Matrix& x, const std::vector<int>& y, double intercept,
                            std::span<const double> coefficients) {
    const auto eta = linear_predictor(x, intercept, coefficients);
    double ll = 0.0;
    for (std::size_t i = 0; i < eta.size(); ++i)
        ll += static_cast<double>(y[i]) * eta[i] - log1pexp(eta[i]);
    return ll;
}

LogitModel fit_logit(const Matrix& x, const std::vector<int>& y, const LogitOptions& options) {
    const std::size_t n = x.rows(), p = x.cols();
    if (y.size() != n) raise(Errc::LengthMismatch, "labels and rows disagree");
    std::size_t n1 = 0;
    for (int v : y) {
        if (v != 0 && v != 1) raise(Errc::NonBinaryLabel, "labels must be 0 or 1");
        n1 += static_cast<std::size_t>(v);
    }
    const std::size_t n0 = n - n1;
    if (n1 == 0 || n0 == 0) raise(Errc::OneClassOnly, "both classes required for fitting");
    if (n <= p + 1)
        raise(Errc::TooFewRows, "need n > p + 1 (n=" + std::to_string(n) + ", p=" +
                                    std::to_string(p) + ")");
    for (std::size_t j = 0; j < p; ++j) {
        double lo = x(0, j), hi = x(0, j);
        for (std::size_t i = 1; i < n; ++i) {
            lo = std::min(lo, x(i, j));
            hi = std::max(hi, x(i, j));
        }
        if (hi - lo > 1e3)
            std::fprintf(stderr,
                         "warning: column %zu has range %.3g; consider scaling before the fit\n",
                         j, hi - lo);
    }

    LogitModel model;
    model.coefficients.assign(p, 0.0);
    // null-model intercept as the starting point
    model.intercept = std::log((static_cast<double>(n1) + 0.5) / (static_cast<double>(n0) + 0.5));
    double ll = logit_log_likelihood(x, y, model.intercept, model.coefficients);

    const std::size_t dim = p + 1;  // intercept first
    std::vector<double> grad(dim), beta(dim), candidate(dim);
    beta[0] = model.intercept;

    auto classify_gap = [&](std::span<const double> eta) {
        // min eta over positives minus max eta over negatives
        double min_pos = std::numeric_limits<double>::infinity();
        double max_neg = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            if (y[i]) min_pos = std::min(min_pos, eta[i]);
            else max_neg = std::max(max_neg, eta[i]);
        }
        return min_pos - max_neg;
    };

    for (int iter = 1; iter <= options.max_iter; ++iter) {
        model.iterations = iter;
        const auto eta = linear_predictor(x, beta[0], std::span(beta).subspan(1));

        // clearly separated: the likelihood has no maximizer
        if (classify_gap(eta) > 30.0) {
            model.separation = true;
            break;
        }

        SymMatrix info(dim);
        std::fill(grad.begin(), grad.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double mu = sigmoid(eta[i]);
            const double w = std::max(mu * (1.0 - mu), 1e-12);
            const double r = static_cast<double>(y[i]) - mu;
            grad[0] += r;
            info(0, 0) += w;
            for (std::size_t a = 0; a < p; ++a) {
                const double xa = x(i, a);
                grad[a + 1] += r * xa;
                info(0, a + 1) += w * xa;
                for (std::size_t b = a; b < p; ++b)
                    info(a + 1, b + 1) += w * xa * x(i, b);
            }
        }
        // symmetrize the accumulated upper triangle
        for (std::size_t a = 0; a < dim; ++a)
            for (std::size_t b = a + 1; b < dim; ++b) info.set(a, b, info(a, b));
        if (options.ridge > 0.0) {
            for (std::size_t a = 1; a < dim; ++a) {
                info(a, a) += options.ridge;
                grad[a] -= options.ridge * beta[a];
            }
        }

        std::vector<double> delta;
        try {
            delta = solve_spd(info, grad);
        } catch (const Error&) {
            if (classify_gap(eta) > 0.0) {
                model.separation = true;
                break;
            }
            raise(Errc::SingularInformation, "information matrix is singular");
        }

        // step-halving keeps the likelihood non-decreasing
        double step = 1.0;
        double new_ll = ll;
        bool accepted = false;
        for (int half = 0; half < 20; ++half) {
            for (std::size_t k = 0; k < dim; ++k) candidate[k] = beta[k] + step * delta[k];
            new_ll = logit_log_likelihood(x, y, candidate[0], std::span(candidate).subspan(1));
            if (options.ridge > 0.0)
                for (std::size_t k = 1; k < dim; ++k)
                    new_ll -= 0.5 * options.ridge * candidate[k] * candidate[k];
            if (new_ll >= ll - 1e-12 * std::abs(ll)) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // no ascent direction left

        double max_change = 0.0;
        for (std::size_t k = 0; k < dim; ++k)
            max_change = std::max(max_change, std::abs(step * delta[k]));
        beta = candidate;
        ll = new_ll;
        model.ll_trace.push_back(ll);
        if (max_change < options.tol) {
            model.converged = true;
            break;
        }
    }

    // final separation screen: perfect split with a widening margin
    if (!model.converged && !model.separation) {
        const auto eta = linear_predictor(x, beta[0], std::span(beta).subspan(1));
        if (classify_gap(eta) > 0.0) model.separation = true;
    }
    if (model.separation) model.converged = false;

    model.intercept = beta[0];
    model.coefficients.assign(beta.begin() + 1, beta.end());
    model.log_likelihood = ll;
    return model;
}

std::vector<double> predict_proba(const LogitModel& model, const Matrix& x) {
    if (x.cols() != model.coefficients.size())
        raise(Errc::DimensionMismatch, "predict_proba: feature count mismatch");
    const auto eta = linear_predictor(x, model.intercept, model.coefficients);
    std::vector<double> probs(eta.size());
    const double lo = std::numeric_limits<double>::min();
    const double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2;
    for (std::size_t i = 0; i < eta.size(); ++i)
        probs[i] = std::clamp(sigmoid(eta[i]), lo, hi);
    return probs;
}

}  // namespace skewguard
