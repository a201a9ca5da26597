#include "skewguard/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace skewguard {

SymMatrix SymMatrix::from_matrix(const Matrix& m, double rel_tol) {
    if (m.rows() != m.cols())
        raise(Errc::DimensionMismatch, "symmetric matrix must be square");
    double max_abs = 0.0;
    for (double v : m.data()) max_abs = std::max(max_abs, std::abs(v));
    SymMatrix out(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = i; j < m.cols(); ++j) {
            const double a = m(i, j), b = m(j, i);
            if (std::abs(a - b) > rel_tol * std::max(1.0, max_abs))
                raise(Errc::InvalidArgument, "matrix is not symmetric at (" + std::to_string(i) +
                                                 "," + std::to_string(j) + ")");
            out.set(i, j, 0.5 * (a + b));
        }
    }
    return out;
}

Matrix cholesky(const SymMatrix& m) {
    const std::size_t n = m.dim();
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, m(i, i));
    const double pivot_floor =
        static_cast<double>(n) * std::numeric_limits<double>::epsilon() * std::max(max_diag, 0.0);

    Matrix L(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = m(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= L(j, k) * L(j, k);
        if (d <= pivot_floor)
            raise(Errc::NotPositiveDefinite,
                  "pivot " + std::to_string(d) + " at column " + std::to_string(j));
        L(j, j) = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = m(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
            L(i, j) = s / L(j, j);
        }
    }
    return L;
}

std::vector<double> solve_lower(const Matrix& lower, std::span<const double> b) {
    const std::size_t n = lower.rows();
    if (lower.cols() != n || b.size() != n)
        raise(Errc::DimensionMismatch, "solve_lower: shape mismatch");
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (lower(i, i) == 0.0)
            raise(Errc::SingularMatrix, "zero pivot at row " + std::to_string(i));
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= lower(i, k) * x[k];
        x[i] = s / lower(i, i);
    }
    return x;
}

std::vector<double> mvn_sample(std::span<const double> center, const Matrix& scatter_chol,
                               RngStream& rng) {
    const std::size_t p = center.size();
    if (scatter_chol.rows() != p || scatter_chol.cols() != p)
        raise(Errc::DimensionMismatch, "mvn_sample: center and factor dimensions disagree");
    std::vector<double> u(p);
    for (auto& v : u) v = rng.next_normal();
    std::vector<double> z(center.begin(), center.end());
    for (std::size_t i = 0; i < p; ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k <= i && k < p; ++k) s += scatter_chol(i, k) * u[k];
        z[i] += s;
    }
    return z;
}

namespace {

// P(a,x) by series expansion; valid for x < a + 1.
double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int k = 0; k < 500; ++k) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Q(a,x) by Lentz continued fraction; valid for x >= a + 1.
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_p(double a, double x) {
    if (a <= 0.0) raise(Errc::InvalidArgument, "gamma_p: a must be positive");
    if (x < 0.0) raise(Errc::InvalidArgument, "gamma_p: x must be non-negative");
    if (x == 0.0) return 0.0;
    return (x < a + 1.0) ? gamma_p_series(a, x) : 1.0 - gamma_q_cf(a, x);
}

double chi2_cdf(double x, unsigned df) {
    if (df == 0) raise(Errc::InvalidArgument, "chi2_cdf: df must be >= 1");
    if (x <= 0.0) return 0.0;
    return gamma_p(0.5 * df, 0.5 * x);
}

double chi2_pdf(double x, unsigned df) {
    if (df == 0) raise(Errc::InvalidArgument, "chi2_pdf: df must be >= 1");
    if (x <= 0.0) return 0.0;
    const double k = 0.5 * df;
    return std::exp((k - 1.0) * std::log(x) - 0.5 * x - std::lgamma(k) - k * std::numbers::ln2);
}

double chi2_quantile(unsigned df, double prob) {
    if (df == 0) raise(Errc::InvalidArgument, "chi2_quantile: df must be >= 1");
    if (!(prob > 0.0 && prob < 1.0))
        raise(Errc::InvalidProbability, "prob must lie in (0,1), got " + std::to_string(prob));

    // Wilson-Hilferty starting point
    const double nu = static_cast<double>(df);
    // inverse normal CDF via Newton on the error function is overkill here;
    // a crude rational start is enough because bisection brackets the root.
    double lo = 0.0;
    double hi = nu + 10.0 * std::sqrt(2.0 * nu) + 10.0;
    while (chi2_cdf(hi, df) < prob) hi *= 2.0;
    double q = nu * std::pow(1.0 - 2.0 / (9.0 * nu) + (prob - 0.5) * std::sqrt(2.0 / (9.0 * nu)), 3.0);
    if (!(q > lo && q < hi)) q = 0.5 * (lo + hi);

    for (int it = 0; it < 200; ++it) {
        const double f = chi2_cdf(q, df) - prob;
        if (f > 0.0)
            hi = q;
        else
            lo = q;
        if (std::abs(f) <= 1e-14) break;
        const double pdf = chi2_pdf(q, df);
        double next = (pdf > 0.0) ? q - f / pdf : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - q) <= 1e-13 * std::max(1.0, q) && std::abs(f) < 1e-10) {
            q = next;
            break;
        }
        q = next;
    }
    return q;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

std::vector<double> column_means(const Matrix& x) {
    std::vector<double> mu(x.cols(), 0.0);
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j) mu[j] += x(i, j);
    for (auto& v : mu) v /= static_cast<double>(x.rows());
    return mu;
}

SymMatrix sample_covariance(const Matrix& x, std::span<const double> mean) {
    const std::size_t n = x.rows(), p = x.cols();
    if (mean.size() != p) raise(Errc::DimensionMismatch, "sample_covariance: mean length");
    if (n < 2) raise(Errc::TooFewRows, "sample covariance needs at least 2 rows");
    SymMatrix s(p);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < p; ++a) {
            const double da = x(i, a) - mean[a];
            for (std::size_t b = a; b < p; ++b) s(a, b) += da * (x(i, b) - mean[b]);
        }
    }
    const double denom = static_cast<double>(n - 1);
    for (std::size_t a = 0; a < p; ++a)
        for (std::size_t b = a; b < p; ++b) s.set(a, b, s(a, b) / denom);
    return s;
}

const char* errc_name(Errc c) {
    switch (c) {
        case Errc::NotPositiveDefinite: return "NotPositiveDefinite";
        case Errc::SingularMatrix: return "SingularMatrix";
        case Errc::DimensionMismatch: return "DimensionMismatch";
        case Errc::InvalidProbability: return "InvalidProbability";
        case Errc::InvalidArgument: return "InvalidArgument";
        case Errc::ParseError: return "ParseError";
        case Errc::MissingValue: return "MissingValue";
        case Errc::NonBinaryLabel: return "NonBinaryLabel";
        case Errc::ZeroScaleColumn: return "ZeroScaleColumn";
        case Errc::IoError: return "IoError";
        case Errc::InvalidLabeling: return "InvalidLabeling";
        case Errc::TooFewRows: return "TooFewRows";
        case Errc::SingularData: return "SingularData";
        case Errc::EmptyInlierSet: return "EmptyInlierSet";
        case Errc::ZeroVarianceColumn: return "ZeroVarianceColumn";
        case Errc::SingularInformation: return "SingularInformation";
        case Errc::LengthMismatch: return "LengthMismatch";
        case Errc::OneClassOnly: return "OneClassOnly";
        case Errc::NoPositives: return "NoPositives";
        case Errc::InvalidDimension: return "InvalidDimension";
        case Errc::BenchmarkFailure: return "BenchmarkFailure";
    }
    return "UnknownError";
}

}  // namespace skewguard
