#include "skewguard/mcd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "skewguard/numkit.hpp"

namespace skewguard {

std::size_t mcd_subset_size(std::size_t n, std::size_t p, double alpha) {
    if (alpha < 0.5 || alpha > 1.0)
        raise(Errc::InvalidArgument, "alpha must lie in [0.5, 1]");
    const double nd = static_cast<double>(n);
    const double half = std::floor((nd + static_cast<double>(p) + 1.0) / 2.0);
    const auto h =
        static_cast<std::size_t>(std::floor(2.0 * half - nd + 2.0 * (nd - half) * alpha));
    return std::min(h, n);
}

double mcd_consistency_factor(std::size_t p, double coverage) {
    if (coverage >= 1.0) return 1.0;
    const double q = chi2_quantile(static_cast<unsigned>(p), coverage);
    return coverage / chi2_cdf(q, static_cast<unsigned>(p) + 2);
}

std::vector<double> mahalanobis_sq_rows(const Matrix& x, std::span<const double> center,
                                        const Matrix& scatter_chol) {
    const std::size_t n = x.rows(), p = x.cols();
    std::vector<double> d2(n);
    std::vector<double> diff(p);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < p; ++j) diff[j] = x(i, j) - center[j];
        const auto w = solve_lower(scatter_chol, diff);
        d2[i] = dot(w, w);
    }
    return d2;
}

double mahalanobis_sq(std::span<const double> x, const RobustFit& fit) {
    if (x.size() != fit.center.size())
        raise(Errc::DimensionMismatch, "mahalanobis_sq: vector length " +
                                           std::to_string(x.size()) + " vs fit dimension " +
                                           std::to_string(fit.center.size()));
    const Matrix chol = cholesky(fit.scatter);
    std::vector<double> diff(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) diff[j] = x[j] - fit.center[j];
    const auto w = solve_lower(chol, diff);
    return dot(w, w);
}

namespace {

constexpr double kRidgeFraction = 1e-8;  // diagonal lift used only for ranking

// Cholesky that falls back to a ridge-regularized copy when the matrix is
// singular; reports whether regularization was needed.
Matrix ranking_cholesky(const SymMatrix& s, bool& degenerate) {
    try {
        degenerate = false;
        return cholesky(s);
    } catch (const Error&) {
        degenerate = true;
        SymMatrix lifted = s;
        const double ridge =
            std::max(kRidgeFraction * lifted.trace() / static_cast<double>(lifted.dim()),
                     kRidgeFraction);
        for (std::size_t i = 0; i < lifted.dim(); ++i) lifted(i, i) += ridge;
        return cholesky(lifted);
    }
}

double log_det_from_chol(const Matrix& chol) {
    double s = 0.0;
    for (std::size_t i = 0; i < chol.rows(); ++i) s += std::log(chol(i, i));
    return 2.0 * s;
}

struct Candidate {
    std::vector<double> center;
    SymMatrix scatter;
    std::vector<std::size_t> subset;
    double log_det = 0.0;
    bool degenerate = false;
    std::size_t start_id = 0;
};

bool better(const Candidate& a, const Candidate& b) {
    if (a.degenerate != b.degenerate) return !a.degenerate;
    if (a.log_det != b.log_det) return a.log_det < b.log_det;
    return a.start_id < b.start_id;
}

std::vector<std::size_t> draw_distinct(std::size_t n, std::size_t k, RngStream& rng) {
    std::vector<std::size_t> picked;
    picked.reserve(k);
    while (picked.size() < k) {
        const auto c = static_cast<std::size_t>(rng.next_below(n));
        if (std::find(picked.begin(), picked.end(), c) == picked.end()) picked.push_back(c);
    }
    return picked;
}

// mean/covariance of an index subset; covariance uses the h-1 divisor
void subset_stats(const Matrix& x, std::span<const std::size_t> idx, std::vector<double>& center,
                  SymMatrix& scatter) {
    const Matrix sub = x.select_rows(idx);
    center = column_means(sub);
    scatter = sample_covariance(sub, center);
}

}  // namespace

CStepResult c_step(const Matrix& x, std::span<const double> center, const SymMatrix& scatter,
                   std::size_t h) {
    const std::size_t n = x.rows(), p = x.cols();
    if (center.size() != p || scatter.dim() != p)
        raise(Errc::DimensionMismatch, "c_step: dimensions disagree");
    if (h < p + 1 || h > n)
        raise(Errc::InvalidArgument, "c_step: h must lie in [p+1, n]");

    bool rank_degenerate = false;
    const Matrix chol = ranking_cholesky(scatter, rank_degenerate);
    const auto d2 = mahalanobis_sq_rows(x, center, chol);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return d2[a] != d2[b] ? d2[a] < d2[b] : a < b;
    });
    order.resize(h);
    std::sort(order.begin(), order.end());

    CStepResult out;
    out.subset = std::move(order);
    subset_stats(x, out.subset, out.center, out.scatter);
    // a singular subset covariance keeps its ridge-lifted determinant for
    // ranking purposes only; the stored scatter stays untouched
    bool new_degenerate = false;
    const Matrix new_chol = ranking_cholesky(out.scatter, new_degenerate);
    out.degenerate = new_degenerate;
    out.log_det = log_det_from_chol(new_chol);
    return out;
}

RobustFit fast_mcd(const Matrix& x, const FastMcdOptions& options, RngStream& rng) {
    const std::size_t n = x.rows(), p = x.cols();
    if (p == 0) raise(Errc::InvalidArgument, "fast_mcd: empty matrix");
    if (n < 2 * (p + 1))
        raise(Errc::TooFewRows, "fast_mcd needs n >= 2(p+1); got n=" + std::to_string(n) +
                                    ", p=" + std::to_string(p));

    const std::size_t h = mcd_subset_size(n, p, options.alpha);

    // exact-fit / collinearity screen on the full sample
    {
        const auto mu = column_means(x);
        const auto cov = sample_covariance(x, mu);
        try {
            (void)cholesky(cov);
        } catch (const Error&) {
            raise(Errc::SingularData, "data covariance is singular (collinear columns "
                                      "or rows on a hyperplane)");
        }
    }

    // h == n: no trimming possible, classical estimate
    if (h >= n) {
        RobustFit fit;
        fit.h = n;
        fit.subset.resize(n);
        std::iota(fit.subset.begin(), fit.subset.end(), 0);
        fit.center = column_means(x);
        fit.scatter = sample_covariance(x, fit.center);
        fit.raw_determinant = std::exp(log_det_from_chol(cholesky(fit.scatter)));
        return fit;
    }

    // Phase 1: elemental starts, two preliminary C-steps each.
    std::vector<Candidate> pool;
    auto run_start = [&](std::size_t start_id, std::vector<std::size_t> elemental) {
        Candidate cand;
        cand.start_id = start_id;
        std::sort(elemental.begin(), elemental.end());
        subset_stats(x, elemental, cand.center, cand.scatter);
        cand.subset = std::move(elemental);
        cand.log_det = log_det_from_chol(ranking_cholesky(cand.scatter, cand.degenerate));
        for (int s = 0; s < options.prelim_csteps; ++s) {
            CStepResult step = c_step(x, cand.center, cand.scatter, h);
            cand.center = std::move(step.center);
            cand.scatter = std::move(step.scatter);
            cand.subset = std::move(step.subset);
            cand.log_det = step.log_det;
            cand.degenerate = step.degenerate;
        }
        pool.push_back(std::move(cand));
    };

    if (options.exhaustive_starts) {
        // lexicographic enumeration of all (p+1)-subsets
        std::vector<std::size_t> comb(p + 1);
        std::iota(comb.begin(), comb.end(), 0);
        std::size_t start_id = 0;
        while (true) {
            run_start(start_id++, comb);
            std::size_t k = p + 1;
            while (k > 0 && comb[k - 1] == n - (p + 1) + (k - 1)) --k;
            if (k == 0) break;
            ++comb[k - 1];
            for (std::size_t j = k; j < p + 1; ++j) comb[j] = comb[j - 1] + 1;
        }
    } else {
        for (int s = 0; s < options.n_starts; ++s) {
            RngStream start_rng = rng.substream(static_cast<std::uint64_t>(s));
            run_start(static_cast<std::size_t>(s), draw_distinct(n, p + 1, start_rng));
        }
    }

    // Phase 2: iterate the best candidates to convergence.
    std::stable_sort(pool.begin(), pool.end(), better);
    const std::size_t keep = std::min<std::size_t>(pool.size(),
                                                   static_cast<std::size_t>(options.keep_best));
    Candidate best;
    bool have_best = false;
    for (std::size_t c = 0; c < keep; ++c) {
        Candidate cand = pool[c];
        double prev_log_det = cand.log_det;
        for (int it = 0; it < options.max_csteps; ++it) {
            CStepResult step = c_step(x, cand.center, cand.scatter, h);
            // C-step theorem: determinant never increases
            if (!step.degenerate && step.log_det > prev_log_det + 1e-9)
                raise(Errc::InvalidArgument, "c_step determinant increased; numerical failure");
            const bool same_subset = step.subset == cand.subset;
            const bool det_converged = std::abs(step.log_det - prev_log_det) < 1e-12;
            prev_log_det = step.log_det;
            cand.center = std::move(step.center);
            cand.scatter = std::move(step.scatter);
            cand.subset = std::move(step.subset);
            cand.log_det = step.log_det;
            cand.degenerate = step.degenerate;
            if (same_subset || det_converged) break;
        }
        if (!have_best || better(cand, best)) {
            best = std::move(cand);
            have_best = true;
        }
    }

    if (!have_best || best.degenerate)
        raise(Errc::SingularData, "at least h rows lie on a hyperplane (exact fit)");

    RobustFit fit;
    fit.h = h;
    fit.subset = best.subset;
    fit.raw_determinant = std::exp(best.log_det);

    // raw estimate, made consistent at the normal model
    const double coverage = static_cast<double>(h) / static_cast<double>(n);
    SymMatrix raw_scatter = best.scatter.scaled(mcd_consistency_factor(p, coverage));

    if (!options.reweight) {
        fit.center = best.center;
        fit.scatter = std::move(raw_scatter);
        (void)cholesky(fit.scatter);
        return fit;
    }

    // reweighting: hard rejection at chi2(p, 0.975)
    const Matrix raw_chol = cholesky(raw_scatter);
    const auto d2 = mahalanobis_sq_rows(x, best.center, raw_chol);
    const double cutoff = chi2_quantile(static_cast<unsigned>(p), 0.975);
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < n; ++i)
        if (d2[i] <= cutoff) kept.push_back(i);
    if (kept.size() < p + 2)
        raise(Errc::SingularData, "too few observations survive reweighting");

    std::vector<double> wcenter;
    SymMatrix wscatter;
    subset_stats(x, kept, wcenter, wscatter);
    wscatter = wscatter.scaled(mcd_consistency_factor(p, 0.975));

    fit.center = std::move(wcenter);
    fit.scatter = std::move(wscatter);
    (void)cholesky(fit.scatter);  // positive definiteness is part of the contract
    return fit;
}

}  // namespace skewguard
