#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "skewguard/numkit.hpp"
#include "skewguard/resample.hpp"

using namespace skewguard;

namespace {

// majority blob at the origin, minority cluster near (3,3) drawn from a
// bounded box so no clean point can cross the chi-square cutoff
Dataset cluster_dataset(std::size_t n0, std::size_t n1, RngStream& rng,
                        const std::vector<std::pair<double, double>>& extra_minority = {}) {
    Dataset d;
    d.feature_names = {"x1", "x2"};
    const std::size_t n = n0 + n1 + extra_minority.size();
    d.X = Matrix(n, 2);
    d.y.assign(n, 0);
    for (std::size_t i = 0; i < n0; ++i)
        for (std::size_t j = 0; j < 2; ++j) d.X(i, j) = rng.next_normal();
    for (std::size_t i = n0; i < n0 + n1; ++i) {
        d.y[i] = 1;
        for (std::size_t j = 0; j < 2; ++j) d.X(i, j) = 3.0 + rng.next_double() - 0.5;
    }
    for (std::size_t k = 0; k < extra_minority.size(); ++k) {
        const std::size_t i = n0 + n1 + k;
        d.y[i] = 1;
        d.X(i, 0) = extra_minority[k].first;
        d.X(i, 1) = extra_minority[k].second;
    }
    return d;
}

std::vector<double> row_vec(const Matrix& m, std::size_t i) {
    return {m.row(i).begin(), m.row(i).end()};
}

}  // namespace

TEST_SUITE_BEGIN("resample");

TEST_CASE("smoothing_constant closed form") {
    // (4 / (4*70))^(1/6)
    const double c = smoothing_constant(2, 70);
    CHECK(c == doctest::Approx(std::pow(1.0 / 70.0, 1.0 / 6.0)).epsilon(1e-14));
    CHECK(c == doctest::Approx(0.49262).epsilon(2e-4));
    // base 1 gives exactly 1 regardless of the exponent
    CHECK(smoothing_constant(1, 4.0 / 3.0) == doctest::Approx(1.0).epsilon(1e-14));
    // strictly decreasing in n
    double prev = 10.0;
    for (double n : {5.0, 10.0, 50.0, 500.0, 5000.0}) {
        const double v = smoothing_constant(3, n);
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("flag_outliers keeps points at the center and drops the far one") {
    RobustFit fit;
    fit.center = {0.0, 0.0};
    fit.scatter = SymMatrix::identity(2);

    Matrix x(4, 2);  // three at the center, one at squared distance 14
    x(3, 0) = std::sqrt(14.0);
    const auto inliers = flag_outliers(x, fit, 0.999);
    CHECK(inliers == std::vector<std::size_t>{0, 1, 2});  // cutoff 13.8155 < 14

    // at cutoff probability .9999 the same point stays in
    const auto wide = flag_outliers(x, fit, 0.9999);
    CHECK(wide.size() == 4);
}

TEST_CASE("flag_outliers raises when everything is flagged") {
    RobustFit fit;
    fit.center = {100.0, 100.0};
    fit.scatter = SymMatrix::identity(2).scaled(1e-6);
    Matrix x(3, 2);  // all far from the fitted center
    CHECK_THROWS_WITH_AS(flag_outliers(x, fit, 0.999), doctest::Contains("EmptyInlierSet"),
                         Error);
}

TEST_CASE("robROSE excludes the illustration's two distant fraud points") {
    RngStream data_rng(7);
    const Dataset d = cluster_dataset(60, 20, data_rng, {{9.0, 1.0}, {10.0, 2.0}});
    const std::size_t out_a = 80, out_b = 81;

    OversampleConfig cfg;
    cfg.target = 5;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        RngStream rng(seed);
        const OversampleResult r = rob_rose(d, cfg, rng);
        CHECK(r.excluded == std::vector<std::size_t>{out_a, out_b});
        for (auto s : r.seeds) {
            CHECK(s != out_a);
            CHECK(s != out_b);
            CHECK(d.y[s] == 1);
        }
        CHECK_FALSE(r.fell_back_to_rose);
    }
}

TEST_CASE("robROSE with m = 1 reports exclusions but emits nothing") {
    RngStream data_rng(7);
    const Dataset d = cluster_dataset(60, 20, data_rng, {{9.0, 1.0}, {10.0, 2.0}});
    OversampleConfig cfg;
    cfg.target = 1;
    RngStream rng(3);
    const OversampleResult r = rob_rose(d, cfg, rng);
    CHECK(r.Z.rows() == 0);
    CHECK(r.seeds.empty());
    CHECK(r.excluded.size() == 2);
}

TEST_CASE("robROSE in the vanishing-bandwidth limit reproduces seed rows exactly") {
    RngStream data_rng(8);
    const Dataset d = cluster_dataset(40, 20, data_rng);
    OversampleConfig cfg;
    cfg.target = 3;
    cfg.shrink = 1e-200;  // H^2 underflows to zero: the kernel collapses
    RngStream rng(5);
    const OversampleResult r = rob_rose(d, cfg, rng);
    REQUIRE(r.Z.rows() == 40);
    for (std::size_t t = 0; t < r.Z.rows(); ++t)
        CHECK(row_vec(r.Z, t) == row_vec(d.X, r.seeds[t]));
}

TEST_CASE("robROSE kernel covariance matches the shrunken MCD scatter") {
    // p=2, n1=70, h=0.5: residuals z - x_seed are N(0, H^2 Sigma1)
    RngStream data_rng(21);
    const Dataset d = cluster_dataset(30, 70, data_rng);
    const auto minority = d.rows_with_label(1);
    const Matrix x1 = d.X.select_rows(minority);

    OversampleConfig cfg;
    const std::size_t want = 100000;
    cfg.target = 1.0 + static_cast<double>(want) / 70.0;

    RngStream rng(99);
    const OversampleResult r = rob_rose(d, cfg, rng);
    REQUIRE(r.Z.rows() == want);

    // the same MCD fit rob_rose used: substream 0 of the stream it consumed
    RngStream mcd_rng = RngStream(99).substream(0);
    const RobustFit fit = fast_mcd(x1, cfg.mcd, mcd_rng);

    const double c = smoothing_constant(2, 70);
    const double h2 = (0.5 * c) * (0.5 * c);
    CHECK(h2 == doctest::Approx(0.060668).epsilon(2e-4));  // closed-form spot value

    // empirical covariance of the residuals
    double s00 = 0, s01 = 0, s11 = 0;
    for (std::size_t t = 0; t < want; ++t) {
        const double r0 = r.Z(t, 0) - d.X(r.seeds[t], 0);
        const double r1 = r.Z(t, 1) - d.X(r.seeds[t], 1);
        s00 += r0 * r0;
        s01 += r0 * r1;
        s11 += r1 * r1;
    }
    s00 /= want;
    s01 /= want;
    s11 /= want;
    CHECK(std::abs(s00 - h2 * fit.scatter(0, 0)) < 0.05 * h2 * fit.scatter(0, 0));
    CHECK(std::abs(s11 - h2 * fit.scatter(1, 1)) < 0.05 * h2 * fit.scatter(1, 1));
    CHECK(std::abs(s01 - h2 * fit.scatter(0, 1)) < 0.05 * h2 * std::sqrt(fit.scatter(0, 0) * fit.scatter(1, 1)));
}

TEST_CASE("robROSE falls back to ROSE when the minority is too small for the MCD") {
    RngStream data_rng(4);
    const Dataset d = cluster_dataset(30, 5, data_rng);  // n1=5 < 2(p+1)=6
    OversampleConfig cfg;
    cfg.target = 4;
    RngStream rng(2);
    const OversampleResult r = rob_rose(d, cfg, rng);
    CHECK(r.fell_back_to_rose);
    CHECK(r.excluded.empty());
    CHECK(r.Z.rows() == 15);
}

TEST_CASE("ROSE draws around the single minority row") {
    RngStream data_rng(5);
    const Dataset d = cluster_dataset(20, 1, data_rng);
    OversampleConfig cfg;
    cfg.target = 6;
    RngStream rng(1);
    const OversampleResult r = rose(d, cfg, rng);
    CHECK(r.duplicated_single);
    REQUIRE(r.Z.rows() == 5);
    const std::size_t seed_row = d.rows_with_label(1)[0];
    for (std::size_t t = 0; t < r.Z.rows(); ++t) CHECK(row_vec(r.Z, t) == row_vec(d.X, seed_row));
}

TEST_CASE("ROSE rejects zero-variance minority columns") {
    Dataset d;
    d.feature_names = {"a", "b"};
    d.X = Matrix(6, 2);
    d.y = {0, 0, 0, 1, 1, 1};
    for (std::size_t i = 3; i < 6; ++i) {
        d.X(i, 0) = static_cast<double>(i);
        d.X(i, 1) = 2.0;  // constant among minority rows
    }
    OversampleConfig cfg;
    RngStream rng(1);
    CHECK_THROWS_WITH_AS(rose(d, cfg, rng), doctest::Contains("ZeroVarianceColumn"), Error);
}

TEST_CASE("ROSE kernel variance scales with the square of the tuning constant") {
    RngStream data_rng(9);
    const Dataset d = cluster_dataset(10, 50, data_rng);
    OversampleConfig cfg;
    cfg.target = 1.0 + 20000.0 / 50.0;

    auto residual_variance = [&](double shrink) {
        OversampleConfig c2 = cfg;
        c2.shrink = shrink;
        RngStream rng(12);
        const OversampleResult r = rose(d, c2, rng);
        double v = 0.0;
        for (std::size_t t = 0; t < r.Z.rows(); ++t) {
            const double res = r.Z(t, 0) - d.X(r.seeds[t], 0);
            v += res * res;
        }
        return v / static_cast<double>(r.Z.rows());
    };
    const double v1 = residual_variance(0.5);
    const double v2 = residual_variance(1.0);
    CHECK(v2 / v1 == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("smoothing_n_total shrinks the kernel when the majority is large") {
    RngStream data_rng(22);
    const Dataset d = cluster_dataset(400, 50, data_rng);
    OversampleConfig cfg;
    cfg.target = 1.0 + 20000.0 / 50.0;

    auto residual_variance = [&](bool use_total) {
        OversampleConfig c2 = cfg;
        c2.smoothing_n_total = use_total;
        RngStream rng(12);
        const OversampleResult r = rose(d, c2, rng);
        double v = 0.0;
        for (std::size_t t = 0; t < r.Z.rows(); ++t) {
            const double res = r.Z(t, 0) - d.X(r.seeds[t], 0);
            v += res * res;
        }
        return v / static_cast<double>(r.Z.rows());
    };
    const double v_minority = residual_variance(false);  // c from n1 = 50
    const double v_total = residual_variance(true);      // c from n = 450
    const double c1 = smoothing_constant(2, 50);
    const double c2 = smoothing_constant(2, 450);
    CHECK(v_total < v_minority);
    CHECK(v_total / v_minority == doctest::Approx((c2 * c2) / (c1 * c1)).epsilon(0.05));
}

TEST_CASE("robROSE and ROSE kernels coincide for a diagonal scatter") {
    // the equivalence claim at kernel level: H^2 * diag(s_d^2) vs diag((H s_d)^2)
    RngStream rng(2);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t p = 1 + rng.next_below(10);
        const double hc = 0.5 * smoothing_constant(p, 37.0);
        for (std::size_t j = 0; j < p; ++j) {
            const double sd = 0.1 + rng.next_double() * 5.0;
            const double robrose_entry = hc * hc * (sd * sd);
            const double rose_entry = (hc * sd) * (hc * sd);
            CHECK(std::abs(robrose_entry - rose_entry) <= 1e-12 * robrose_entry);
        }
    }
}

TEST_CASE("SMOTE synthetics lie on segments between minority neighbours") {
    RngStream data_rng(3);
    Dataset d = cluster_dataset(10, 2, data_rng);
    const auto minority = d.rows_with_label(1);
    d.X(minority[0], 0) = 0.0;
    d.X(minority[0], 1) = 0.0;
    d.X(minority[1], 0) = 2.0;
    d.X(minority[1], 1) = 2.0;

    OversampleConfig cfg;
    cfg.target = 1.0 + 5000.0 / 2.0;
    RngStream rng(8);
    const OversampleResult r = smote(d, cfg, rng);
    REQUIRE(r.Z.rows() == 5000);
    double alpha_sum = 0.0;
    for (std::size_t t = 0; t < r.Z.rows(); ++t) {
        // on the segment (0,0)-(2,2): coordinates equal and within the hull
        CHECK(r.Z(t, 0) == doctest::Approx(r.Z(t, 1)).epsilon(1e-12));
        CHECK(r.Z(t, 0) >= 0.0);
        CHECK(r.Z(t, 0) <= 2.0);
        alpha_sum += r.Z(t, 0) / 2.0;
    }
    // alpha ~ Uniform[0,1] up to direction: mean near 1/2
    CHECK(std::abs(alpha_sum / 5000.0 - 0.5) < 0.02);
}

TEST_CASE("SMOTE stays inside the per-coordinate minority hull") {
    RngStream data_rng(6);
    const Dataset d = cluster_dataset(20, 15, data_rng);
    const auto minority = d.rows_with_label(1);
    OversampleConfig cfg;
    cfg.target = 12;
    cfg.k_neighbors = 50;  // clamps to n1 - 1
    RngStream rng(4);
    const OversampleResult r = smote(d, cfg, rng);
    for (std::size_t j = 0; j < 2; ++j) {
        double lo = 1e300, hi = -1e300;
        for (auto i : minority) {
            lo = std::min(lo, d.X(i, j));
            hi = std::max(hi, d.X(i, j));
        }
        for (std::size_t t = 0; t < r.Z.rows(); ++t) {
            CHECK(r.Z(t, j) >= lo - 1e-12);
            CHECK(r.Z(t, j) <= hi + 1e-12);
        }
    }
}

TEST_CASE("SMOTE duplicates a single minority row with a warning flag") {
    RngStream data_rng(10);
    const Dataset d = cluster_dataset(10, 1, data_rng);
    OversampleConfig cfg;
    cfg.target = 4;
    RngStream rng(3);
    const OversampleResult r = smote(d, cfg, rng);
    CHECK(r.duplicated_single);
    const std::size_t seed_row = d.rows_with_label(1)[0];
    for (std::size_t t = 0; t < r.Z.rows(); ++t) CHECK(row_vec(r.Z, t) == row_vec(d.X, seed_row));
}

TEST_CASE("identical seeds reproduce identical synthetic matrices bitwise") {
    RngStream data_rng(13);
    const Dataset d = cluster_dataset(40, 20, data_rng);
    OversampleConfig cfg;
    cfg.target = 7;
    for (Method m : {Method::Smote, Method::Rose, Method::RobRose}) {
        RngStream r1(42), r2(42), r3(43);
        const OversampleResult a = oversample(d, m, cfg, r1);
        const OversampleResult b = oversample(d, m, cfg, r2);
        const OversampleResult c = oversample(d, m, cfg, r3);
        CHECK(a.Z == b.Z);
        CHECK(a.seeds == b.seeds);
        CHECK(a.Z.data() != c.Z.data());
    }
}

TEST_CASE("robROSE is equivariant under positive diagonal feature scaling") {
    RngStream data_rng(19);
    const Dataset d = cluster_dataset(40, 30, data_rng);
    const double scale[2] = {3.5, 0.25};
    Dataset scaled = d;
    for (std::size_t i = 0; i < d.n(); ++i)
        for (std::size_t j = 0; j < 2; ++j) scaled.X(i, j) = d.X(i, j) * scale[j];

    OversampleConfig cfg;
    cfg.target = 4;
    RngStream r1(6), r2(6);
    const OversampleResult a = rob_rose(d, cfg, r1);
    const OversampleResult b = rob_rose(scaled, cfg, r2);
    CHECK(a.seeds == b.seeds);
    CHECK(a.excluded == b.excluded);
    REQUIRE(a.Z.rows() == b.Z.rows());
    for (std::size_t t = 0; t < a.Z.rows(); ++t)
        for (std::size_t j = 0; j < 2; ++j)
            CHECK(b.Z(t, j) == doctest::Approx(a.Z(t, j) * scale[j]).epsilon(1e-6));
}

TEST_CASE("rebalance appends labelled, flagged synthetic rows") {
    RngStream data_rng(14);
    Dataset d = cluster_dataset(300, 100, data_rng);
    d.cat_names = {"segment"};
    d.cat_dicts = {{"retail", "corporate"}};
    d.cat_codes = {{}};
    for (std::size_t i = 0; i < d.n(); ++i)
        d.cat_codes[0].push_back(static_cast<int>(i % 2));

    OversampleConfig cfg;
    cfg.target = 10;
    RngStream rng(15);
    const Dataset out = rebalance(d, Method::RobRose, cfg, rng);
    CHECK(out.n() == d.n() + 900);
    CHECK(out.count_label(1) == 1000);  // m * n1
    // original rows first, order preserved
    for (std::size_t i = 0; i < d.n(); ++i) {
        CHECK(out.y[i] == d.y[i]);
        CHECK(out.synthetic[i] == 0);
        CHECK(row_vec(out.X, i) == row_vec(d.X, i));
    }
    for (std::size_t i = d.n(); i < out.n(); ++i) {
        CHECK(out.y[i] == 1);
        CHECK(out.synthetic[i] == 1);
    }
    // categorical values inherited from minority seed rows only
    for (std::size_t i = d.n(); i < out.n(); ++i) {
        const int code = out.cat_codes[0][i];
        CHECK((code == 0 || code == 1));
    }
}

TEST_CASE("rebalance with m = 1 returns the input unchanged") {
    RngStream data_rng(16);
    const Dataset d = cluster_dataset(30, 10, data_rng);
    OversampleConfig cfg;
    cfg.target = 1;
    RngStream rng(2);
    CHECK(rebalance(d, Method::Rose, cfg, rng).value_equal(d));
}

TEST_CASE("rebalance rejects inverted labeling") {
    RngStream data_rng(18);
    Dataset d = cluster_dataset(10, 5, data_rng);
    for (auto& v : d.y) v = 1 - v;  // label 1 now the majority
    OversampleConfig cfg;
    RngStream rng(2);
    CHECK_THROWS_WITH_AS(rebalance(d, Method::Rose, cfg, rng),
                         doctest::Contains("InvalidLabeling"), Error);
}

TEST_CASE("seeds never reference excluded rows across many seeds") {
    RngStream data_rng(20);
    const Dataset d = cluster_dataset(50, 25, data_rng, {{12.0, -3.0}, {-8.0, 11.0}});
    OversampleConfig cfg;
    cfg.target = 6;
    for (std::uint64_t seed = 100; seed < 120; ++seed) {
        RngStream rng(seed);
        const OversampleResult r = rob_rose(d, cfg, rng);
        const std::set<std::size_t> excluded(r.excluded.begin(), r.excluded.end());
        for (auto s : r.seeds) CHECK(excluded.count(s) == 0);
    }
}

TEST_SUITE_END();
