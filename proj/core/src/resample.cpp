#include "skewguard/resample.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "skewguard/numkit.hpp"

namespace skewguard {

Method method_from_string(const std::string& name) {
    if (name == "smote") return Method::Smote;
    if (name == "rose") return Method::Rose;
    if (name == "robrose") return Method::RobRose;
    raise(Errc::InvalidArgument, "unknown method '" + name + "' (smote|rose|robrose)");
}

const char* method_name(Method m) {
    switch (m) {
        case Method::Smote: return "smote";
        case Method::Rose: return "rose";
        case Method::RobRose: return "robrose";
    }
    return "?";
}

void OversampleConfig::validate() const {
    if (target < 1.0) raise(Errc::InvalidArgument, "target multiplier m must be >= 1");
    if (shrink <= 0.0) raise(Errc::InvalidArgument, "shrink constant h must be > 0");
    if (!(cutoff_prob > 0.5 && cutoff_prob < 1.0))
        raise(Errc::InvalidProbability, "cutoff_prob must lie in (0.5, 1)");
    if (k_neighbors < 1) raise(Errc::InvalidArgument, "k must be >= 1");
}

double smoothing_constant(std::size_t p, double n) {
    if (p < 1 || n <= 0.0) raise(Errc::InvalidArgument, "smoothing_constant: p >= 1, n > 0");
    const double pd = static_cast<double>(p);
    return std::pow(4.0 / ((pd + 2.0) * n), 1.0 / (pd + 4.0));
}

std::vector<std::size_t> flag_outliers(const Matrix& x_minority, const RobustFit& fit,
                                       double cutoff_prob) {
    const std::size_t p = x_minority.cols();
    if (fit.center.size() != p)
        raise(Errc::DimensionMismatch, "flag_outliers: fit dimension mismatch");
    const double cutoff = chi2_quantile(static_cast<unsigned>(p), cutoff_prob);
    const Matrix chol = cholesky(fit.scatter);
    const auto d2 = mahalanobis_sq_rows(x_minority, fit.center, chol);
    std::vector<std::size_t> inliers;
    for (std::size_t i = 0; i < d2.size(); ++i)
        if (d2[i] < cutoff) inliers.push_back(i);
    if (inliers.empty())
        raise(Errc::EmptyInlierSet, "every minority row exceeds the chi-square cutoff");
    return inliers;
}

namespace {

std::size_t synthetic_count(double target, std::size_t n1) {
    return static_cast<std::size_t>(
        std::llround((target - 1.0) * static_cast<double>(n1)));
}

// shared assembly: draw nsyn seeds from `eligible` (local minority indices),
// emit one synthetic row per seed via `emit(local_seed, out_row_span)`
template <typename Emit>
void generate_rows(OversampleResult& result, const Dataset& d,
                   const std::vector<std::size_t>& minority_rows,
                   const std::vector<std::size_t>& eligible, std::size_t nsyn, std::size_t p,
                   RngStream& rng, Emit&& emit) {
    result.Z = Matrix(nsyn, p);
    result.seeds.reserve(nsyn);
    result.cat_codes.assign(d.q(), {});
    for (std::size_t t = 0; t < nsyn; ++t) {
        const std::size_t local = eligible[rng.next_below(eligible.size())];
        emit(local, result.Z.row(t), rng);
        result.seeds.push_back(minority_rows[local]);
        for (std::size_t c = 0; c < d.q(); ++c)
            result.cat_codes[c].push_back(d.cat_codes[c][minority_rows[local]]);
    }
}

std::vector<double> minority_column_sds(const Matrix& x1) {
    const auto mu = column_means(x1);
    const SymMatrix cov = sample_covariance(x1, mu);
    std::vector<double> sd(x1.cols());
    for (std::size_t j = 0; j < sd.size(); ++j) sd[j] = std::sqrt(cov(j, j));
    return sd;
}

}  // namespace

OversampleResult rose(const Dataset& train, const OversampleConfig& cfg, RngStream& rng) {
    cfg.validate();
    const auto minority_rows = train.rows_with_label(1);
    const std::size_t n1 = minority_rows.size();
    if (n1 == 0) raise(Errc::TooFewRows, "no minority rows to oversample");
    const Matrix x1 = train.X.select_rows(minority_rows);
    const std::size_t p = train.p();

    OversampleResult result;
    std::vector<double> bandwidth(p, 0.0);
    if (n1 >= 2) {
        const auto sd = minority_column_sds(x1);
        for (std::size_t j = 0; j < p; ++j)
            if (sd[j] == 0.0)
                raise(Errc::ZeroVarianceColumn,
                      "minority column '" + train.feature_names[j] + "' is constant");
        const double n_kernel =
            cfg.smoothing_n_total ? static_cast<double>(train.n()) : static_cast<double>(n1);
        const double hc = cfg.shrink * smoothing_constant(p, n_kernel);
        for (std::size_t j = 0; j < p; ++j) bandwidth[j] = hc * sd[j];
    } else {
        result.duplicated_single = true;  // kernel degenerates to the single row
    }

    std::vector<std::size_t> all(n1);
    std::iota(all.begin(), all.end(), 0);
    RngStream draw_rng = rng.substream(1);
    generate_rows(result, train, minority_rows, all, synthetic_count(cfg.target, n1), p, draw_rng,
                  [&](std::size_t local, std::span<double> out, RngStream& r) {
                      for (std::size_t j = 0; j < p; ++j)
                          out[j] = x1(local, j) + bandwidth[j] * r.next_normal();
                  });
    return result;
}

OversampleResult rob_rose(const Dataset& train, const OversampleConfig& cfg, RngStream& rng) {
    cfg.validate();
    const auto minority_rows = train.rows_with_label(1);
    const std::size_t n1 = minority_rows.size();
    if (n1 == 0) raise(Errc::TooFewRows, "no minority rows to oversample");
    const std::size_t p = train.p();

    // MCD needs n1 >= 2(p+1); below that, degrade to plain ROSE
    if (n1 < 2 * (p + 1)) {
        OversampleResult result = rose(train, cfg, rng);
        result.fell_back_to_rose = true;
        result.excluded.clear();
        return result;
    }

    const Matrix x1 = train.X.select_rows(minority_rows);
    RngStream mcd_rng = rng.substream(0);
    const RobustFit fit = fast_mcd(x1, cfg.mcd, mcd_rng);

    const auto inliers = flag_outliers(x1, fit, cfg.cutoff_prob);

    OversampleResult result;
    {
        std::vector<bool> is_in(n1, false);
        for (auto i : inliers) is_in[i] = true;
        for (std::size_t i = 0; i < n1; ++i)
            if (!is_in[i]) result.excluded.push_back(minority_rows[i]);
    }

    const double n_kernel =
        cfg.smoothing_n_total ? static_cast<double>(train.n()) : static_cast<double>(n1);
    const double shrink_factor = cfg.shrink * smoothing_constant(p, n_kernel);  // H = h·c
    const Matrix scatter_chol = cholesky(fit.scatter);  // chol(H²Σ) = H·chol(Σ)

    RngStream draw_rng = rng.substream(1);
    generate_rows(result, train, minority_rows, inliers, synthetic_count(cfg.target, n1), p,
                  draw_rng, [&](std::size_t local, std::span<double> out, RngStream& r) {
                      std::vector<double> u(p);
                      for (auto& v : u) v = r.next_normal();
                      for (std::size_t i = 0; i < p; ++i) {
                          double s = 0.0;
                          for (std::size_t k = 0; k <= i; ++k) s += scatter_chol(i, k) * u[k];
                          out[i] = x1(local, i) + shrink_factor * s;
                      }
                  });
    return result;
}

OversampleResult smote(const Dataset& train, const OversampleConfig& cfg, RngStream& rng) {
    cfg.validate();
    const auto minority_rows = train.rows_with_label(1);
    const std::size_t n1 = minority_rows.size();
    if (n1 == 0) raise(Errc::TooFewRows, "no minority rows to oversample");
    const Matrix x1 = train.X.select_rows(minority_rows);
    const std::size_t p = train.p();

    OversampleResult result;
    std::vector<std::size_t> all(n1);
    std::iota(all.begin(), all.end(), 0);
    RngStream draw_rng = rng.substream(1);

    if (n1 == 1) {
        // nothing to interpolate with: duplicate, with a warning flag
        result.duplicated_single = true;
        generate_rows(result, train, minority_rows, all, synthetic_count(cfg.target, n1), p,
                      draw_rng, [&](std::size_t local, std::span<double> out, RngStream&) {
                          for (std::size_t j = 0; j < p; ++j) out[j] = x1(local, j);
                      });
        return result;
    }

    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(cfg.k_neighbors), n1 - 1);

    // k nearest minority neighbours per row; ties break toward the lower index
    std::vector<std::vector<std::size_t>> neighbours(n1);
    std::vector<std::pair<double, std::size_t>> dist(n1 - 1);
    for (std::size_t i = 0; i < n1; ++i) {
        std::size_t m = 0;
        for (std::size_t j = 0; j < n1; ++j) {
            if (j == i) continue;
            double d2 = 0.0;
            for (std::size_t c = 0; c < p; ++c) {
                const double diff = x1(i, c) - x1(j, c);
                d2 += diff * diff;
            }
            dist[m++] = {d2, j};
        }
        std::sort(dist.begin(), dist.end());
        neighbours[i].resize(k);
        for (std::size_t t = 0; t < k; ++t) neighbours[i][t] = dist[t].second;
    }

    generate_rows(result, train, minority_rows, all, synthetic_count(cfg.target, n1), p, draw_rng,
                  [&](std::size_t local, std::span<double> out, RngStream& r) {
                      const std::size_t mate = neighbours[local][r.next_below(k)];
                      const double alpha = r.next_double();
                      for (std::size_t j = 0; j < p; ++j)
                          out[j] = x1(local, j) + alpha * (x1(mate, j) - x1(local, j));
                  });
    return result;
}

OversampleResult oversample(const Dataset& train, Method method, const OversampleConfig& cfg,
                            RngStream& rng) {
    switch (method) {
        case Method::Smote: return smote(train, cfg, rng);
        case Method::Rose: return rose(train, cfg, rng);
        case Method::RobRose: return rob_rose(train, cfg, rng);
    }
    raise(Errc::InvalidArgument, "unreachable method");
}

Dataset append_synthetic(const Dataset& train, const OversampleResult& result) {
    Dataset out = train;
    if (out.synthetic.empty()) out.synthetic.assign(out.n(), 0);
    for (std::size_t t = 0; t < result.Z.rows(); ++t) {
        out.X.append_row(result.Z.row(t));
        out.y.push_back(1);
        out.synthetic.push_back(1);
        for (std::size_t c = 0; c < out.q(); ++c)
            out.cat_codes[c].push_back(result.cat_codes[c][t]);
    }
    return out;
}

Dataset rebalance(const Dataset& train, Method method, const OversampleConfig& cfg,
                  RngStream& rng) {
    if (!train.has_both_classes())
        raise(Errc::InvalidLabeling, "rebalance needs both classes present");
    check_minority_labeling(train);
    const OversampleResult result = oversample(train, method, cfg, rng);
    return append_synthetic(train, result);
}

}  // namespace skewguard
