#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "skewguard/dataset.hpp"
#include "skewguard/resample.hpp"
#include "skewguard/rng.hpp"

namespace skewguard {

/// One simulation configuration. Setting 1 is the clean design
/// (contamination 0); setting 2 replaces a fraction of the training
/// minority with outliers centered at mu_out.
struct SimSpec {
    int setting = 1;                // label used in reports
    std::size_t p = 10;             // dimension (grid over {5, 10} exposed)
    std::size_t n1 = 100;           // minority count
    std::size_t n0 = 900;           // majority count
    double contamination = 0.0;     // training-minority outlier fraction
    std::vector<double> mu_out;     // empty = (-10, -2, ..., -2)
    int repetitions = 100;
    double split = 0.7;             // training fraction
    std::uint64_t seed = 0;

    void validate() const;
    std::vector<double> outlier_center() const;
};

SimSpec make_sim_spec(int setting, std::size_t n0, std::size_t p);

/// Majority rows ~ N(0, I), minority rows ~ N((1/3,...,1/3), Σ₁) with Σ₁
/// tridiagonal: unit diagonal, 0.5 on the first off-diagonals. Majority
/// rows come first; labels are 0/1.
Dataset gen_setting(const SimSpec& spec, RngStream& rng);

/// Σ₁ of the minority class for dimension p.
SymMatrix minority_covariance(std::size_t p);

/// Replaces round(ε·n1) uniformly chosen minority rows by draws from
/// N(mu_out, Σ₁); labels stay 1. Intended for the training partition only.
Dataset contaminate(const Dataset& train, const SimSpec& spec, RngStream& rng);

/// Per-class split at round(fraction·count) rows into train; row order is
/// preserved inside each partition. Throws TooFewRows when either partition
/// would miss a class entirely.
std::pair<Dataset, Dataset> stratified_split(const Dataset& d, double train_fraction,
                                             RngStream& rng);

struct BenchCell {
    int setting = 1;
    std::size_t p = 0;
    std::size_t n0 = 0;
    std::size_t n1 = 0;
    std::string method;
    double auc_mean = 0.0, auc_se = 0.0;
    double auprc_mean = 0.0, auprc_se = 0.0;
    int n_excluded = 0;
    std::vector<double> auc_reps;    // filled when keep_replicates is set;
    std::vector<double> auprc_reps;  // failed repetitions carry NaN
};

struct BenchReport {
    std::vector<BenchCell> cells;  // grid-major, then method order as given
    int repetitions = 0;
};

inline constexpr const char* kMethodImbalanced = "imbalanced";

/// Full experiment protocol: per repetition generate → stratified split →
/// contaminate(train) → per method rebalance (or not, for "imbalanced") →
/// logistic fit → score test → AUC and AUPRC. Aggregates means and standard
/// errors (sd/√reps) in repetition order, so the report is bitwise
/// reproducible for a given seed regardless of thread count. An arm that
/// throws is excluded from its cell; more than 5% exclusions in any cell
/// aborts with BenchmarkFailure.
BenchReport run_benchmark(const std::vector<SimSpec>& grid,
                          const std::vector<std::string>& methods, const OversampleConfig& cfg,
                          std::uint64_t seed, int threads = 0, bool keep_replicates = false);

/// Long-format CSV: setting,n0,method,metric,mean,se,n_excluded.
void write_bench_csv(const BenchReport& report, const std::filesystem::path& path);

/// Aligned text tables in the familiar per-setting, per-metric layout.
std::string format_bench_table(const BenchReport& report);

}  // namespace skewguard
