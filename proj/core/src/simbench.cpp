#include "skewguard/simbench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <cstdio>
#include <iomanip>
#include <limits>
#include <sstream>
#include <thread>

#include "skewguard/csv.hpp"
#include "skewguard/logit.hpp"
#include "skewguard/metrics.hpp"
#include "skewguard/numkit.hpp"

namespace skewguard {

void SimSpec::validate() const {
    if (p < 2) raise(Errc::InvalidDimension, "simulation needs p >= 2");
    if (n1 == 0 || n0 < n1)
        raise(Errc::InvalidLabeling, "minority count must be positive and at most the majority");
    if (contamination < 0.0 || contamination >= 1.0)
        raise(Errc::InvalidArgument, "contamination must lie in [0, 1)");
    if (repetitions < 1) raise(Errc::InvalidArgument, "repetitions must be >= 1");
    if (!(split > 0.0 && split < 1.0))
        raise(Errc::InvalidArgument, "train fraction must lie in (0, 1)");
    if (!mu_out.empty() && mu_out.size() != p)
        raise(Errc::DimensionMismatch, "mu_out length must equal p");
}

std::vector<double> SimSpec::outlier_center() const {
    if (!mu_out.empty()) return mu_out;
    std::vector<double> mu(p, -2.0);
    mu[0] = -10.0;
    return mu;
}

SimSpec make_sim_spec(int setting, std::size_t n0, std::size_t p) {
    SimSpec spec;
    spec.setting = setting;
    spec.n0 = n0;
    spec.p = p;
    spec.contamination = (setting == 2) ? 0.1 : 0.0;
    return spec;
}

SymMatrix minority_covariance(std::size_t p) {
    SymMatrix s = SymMatrix::identity(p);
    for (std::size_t i = 0; i + 1 < p; ++i) s.set(i, i + 1, 0.5);
    return s;
}

Dataset gen_setting(const SimSpec& spec, RngStream& rng) {
    spec.validate();
    const std::size_t p = spec.p;
    const Matrix chol1 = cholesky(minority_covariance(p));
    const std::vector<double> mu1(p, 1.0 / 3.0);

    Dataset d;
    d.X = Matrix(spec.n0 + spec.n1, p);
    d.y.assign(spec.n0 + spec.n1, 0);
    d.feature_names.resize(p);
    for (std::size_t j = 0; j < p; ++j) d.feature_names[j] = "x" + std::to_string(j + 1);

    for (std::size_t i = 0; i < spec.n0; ++i)
        for (std::size_t j = 0; j < p; ++j) d.X(i, j) = rng.next_normal();
    for (std::size_t i = 0; i < spec.n1; ++i) {
        const auto z = mvn_sample(mu1, chol1, rng);
        for (std::size_t j = 0; j < p; ++j) d.X(spec.n0 + i, j) = z[j];
        d.y[spec.n0 + i] = 1;
    }
    return d;
}

Dataset contaminate(const Dataset& train, const SimSpec& spec, RngStream& rng) {
    auto minority = train.rows_with_label(1);
    const auto k = static_cast<std::size_t>(
        std::llround(spec.contamination * static_cast<double>(minority.size())));
    if (k == 0) return train;

    // partial Fisher-Yates picks k distinct rows
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + rng.next_below(minority.size() - i);
        std::swap(minority[i], minority[j]);
    }

    const auto mu_out = spec.outlier_center();
    if (mu_out.size() != train.p())
        raise(Errc::DimensionMismatch, "outlier center length must match feature count");
    const Matrix chol1 = cholesky(minority_covariance(train.p()));

    Dataset out = train;
    for (std::size_t i = 0; i < k; ++i) {
        const auto z = mvn_sample(mu_out, chol1, rng);
        for (std::size_t j = 0; j < train.p(); ++j) out.X(minority[i], j) = z[j];
    }
    return out;
}

std::pair<Dataset, Dataset> stratified_split(const Dataset& d, double train_fraction,
                                             RngStream& rng) {
    if (!d.has_both_classes()) raise(Errc::OneClassOnly, "split needs both classes");
    if (!(train_fraction > 0.0 && train_fraction <= 1.0))
        raise(Errc::InvalidArgument, "train fraction must lie in (0, 1]");

    std::vector<std::size_t> train_idx, test_idx;
    for (int label : {0, 1}) {
        auto idx = d.rows_with_label(label);
        const auto want = static_cast<std::size_t>(
            std::llround(train_fraction * static_cast<double>(idx.size())));
        if (want == 0 || want >= idx.size())
            raise(Errc::TooFewRows, "class " + std::to_string(label) +
                                        " would be missing from one partition");
        // Fisher-Yates, then first `want` rows train
        for (std::size_t i = idx.size() - 1; i > 0; --i) {
            const std::size_t j = rng.next_below(i + 1);
            std::swap(idx[i], idx[j]);
        }
        train_idx.insert(train_idx.end(), idx.begin(), idx.begin() + want);
        test_idx.insert(test_idx.end(), idx.begin() + want, idx.end());
    }
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());
    return {d.select_rows(train_idx), d.select_rows(test_idx)};
}

namespace {

struct ArmOutcome {
    double auc = 0.0;
    double auprc = 0.0;
    bool failed = false;
};

ArmOutcome run_arm(const Dataset& train, const Dataset& test, const std::string& method,
                   const OversampleConfig& cfg, RngStream rng) {
    ArmOutcome out;
    try {
        Dataset fitted_on = train;
        if (method != kMethodImbalanced)
            fitted_on = rebalance(train, method_from_string(method), cfg, rng);
        const LogitModel model = fit_logit(fitted_on.X, fitted_on.y);
        const auto probs = predict_proba(model, test.X);
        out.auc = roc_auc(probs, test.y).area;
        out.auprc = pr_auprc(probs, test.y).area;
    } catch (const Error&) {
        out.failed = true;
    }
    return out;
}

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

// two-pass, fixed index order: bitwise stable regardless of thread count
MeanSe aggregate(const std::vector<double>& values) {
    MeanSe out;
    if (values.empty()) return out;
    double sum = 0.0;
    for (double v : values) sum += v;
    out.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - out.mean) * (v - out.mean);
        const double sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
        out.se = sd / std::sqrt(static_cast<double>(values.size()));
    }
    return out;
}

}  // namespace

BenchReport run_benchmark(const std::vector<SimSpec>& grid,
                          const std::vector<std::string>& methods, const OversampleConfig& cfg,
                          std::uint64_t seed, int threads, bool keep_replicates) {
    if (grid.empty() || methods.empty())
        raise(Errc::InvalidArgument, "benchmark grid and method list must be non-empty");
    for (const auto& spec : grid) spec.validate();
    for (const auto& m : methods)
        if (m != kMethodImbalanced) (void)method_from_string(m);

    if (threads <= 0) {
        const unsigned hw = std::thread::hardware_concurrency();
        threads = hw ? static_cast<int>(hw) : 1;
    }

    struct RepSlot {
        std::vector<ArmOutcome> arms;  // one per method
    };
    // flatten the work: one unit per (spec, repetition)
    std::vector<std::pair<std::size_t, int>> units;
    std::vector<std::vector<RepSlot>> results(grid.size());
    for (std::size_t s = 0; s < grid.size(); ++s) {
        results[s].resize(static_cast<std::size_t>(grid[s].repetitions));
        for (int r = 0; r < grid[s].repetitions; ++r) units.emplace_back(s, r);
    }

    const RngStream root(seed);
    auto run_unit = [&](std::size_t spec_idx, int rep) {
        const SimSpec& spec = grid[spec_idx];
        RngStream rep_rng =
            root.substream(spec_idx).substream(static_cast<std::uint64_t>(rep));
        RngStream gen_rng = rep_rng.substream(0);
        RngStream split_rng = rep_rng.substream(1);
        RngStream contam_rng = rep_rng.substream(2);

        const Dataset data = gen_setting(spec, gen_rng);
        auto [train, test] = stratified_split(data, spec.split, split_rng);
        train = contaminate(train, spec, contam_rng);

        RepSlot slot;
        slot.arms.resize(methods.size());
        for (std::size_t m = 0; m < methods.size(); ++m)
            slot.arms[m] =
                run_arm(train, test, methods[m], cfg, rep_rng.substream(10 + m));
        results[spec_idx][static_cast<std::size_t>(rep)] = std::move(slot);
    };

    if (threads <= 1 || units.size() <= 1) {
        for (const auto& [s, r] : units) run_unit(s, r);
    } else {
        // a repetition-level failure (not an arm failure) must not escape a
        // worker thread; capture the first one and rethrow after the join
        std::atomic<std::size_t> next{0};
        std::exception_ptr first_error;
        std::mutex error_mutex;
        auto worker = [&] {
            for (;;) {
                const std::size_t u = next.fetch_add(1);
                if (u >= units.size()) return;
                try {
                    run_unit(units[u].first, units[u].second);
                } catch (...) {
                    const std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        };
        std::vector<std::thread> pool;
        const auto nthreads = std::min<std::size_t>(static_cast<std::size_t>(threads),
                                                    units.size());
        pool.reserve(nthreads);
        for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    BenchReport report;
    report.repetitions = grid.front().repetitions;
    for (std::size_t s = 0; s < grid.size(); ++s) {
        for (std::size_t m = 0; m < methods.size(); ++m) {
            BenchCell cell;
            cell.setting = grid[s].setting;
            cell.p = grid[s].p;
            cell.n0 = grid[s].n0;
            cell.n1 = grid[s].n1;
            cell.method = methods[m];
            std::vector<double> aucs, auprcs;
            for (const auto& slot : results[s]) {
                const ArmOutcome& arm = slot.arms[m];
                if (arm.failed) {
                    ++cell.n_excluded;
                } else {
                    aucs.push_back(arm.auc);
                    auprcs.push_back(arm.auprc);
                }
                if (keep_replicates) {
                    const double nan = std::numeric_limits<double>::quiet_NaN();
                    cell.auc_reps.push_back(arm.failed ? nan : arm.auc);
                    cell.auprc_reps.push_back(arm.failed ? nan : arm.auprc);
                }
            }
            const double fail_fraction = static_cast<double>(cell.n_excluded) /
                                         static_cast<double>(grid[s].repetitions);
            if (fail_fraction > 0.05)
                raise(Errc::BenchmarkFailure,
                      "cell (setting=" + std::to_string(cell.setting) + ", n0=" +
                          std::to_string(cell.n0) + ", " + cell.method + ") lost " +
                          std::to_string(cell.n_excluded) + " repetitions (> 5%)");
            const MeanSe auc = aggregate(aucs);
            const MeanSe ap = aggregate(auprcs);
            cell.auc_mean = auc.mean;
            cell.auc_se = auc.se;
            cell.auprc_mean = ap.mean;
            cell.auprc_se = ap.se;
            report.cells.push_back(std::move(cell));
        }
    }
    return report;
}

void write_bench_csv(const BenchReport& report, const std::filesystem::path& path) {
    std::string out = "setting,n0,method,metric,mean,se,n_excluded\n";
    for (const auto& c : report.cells) {
        for (int metric = 0; metric < 2; ++metric) {
            out += std::to_string(c.setting) + "," + std::to_string(c.n0) + "," + c.method + ",";
            out += metric == 0 ? "auc," : "auprc,";
            out += format_double(metric == 0 ? c.auc_mean : c.auprc_mean) + ",";
            out += format_double(metric == 0 ? c.auc_se : c.auprc_se) + ",";
            out += std::to_string(c.n_excluded) + "\n";
        }
    }
    write_file_atomic(path, out);
}

namespace {

std::string paper_style(double mean, double se) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.3f", mean);
    std::string s(buf);
    std::snprintf(buf, sizeof(buf), "%.3f", se);
    std::string e(buf);
    if (e.starts_with("0.")) e.erase(0, 1);  // the tables print (.003)
    return s + " (" + e + ")";
}

}  // namespace

std::string format_bench_table(const BenchReport& report) {
    // group cells by (setting, p), preserving first-seen order
    std::vector<std::pair<int, std::size_t>> groups;
    for (const auto& c : report.cells) {
        const std::pair<int, std::size_t> key{c.setting, c.p};
        if (std::find(groups.begin(), groups.end(), key) == groups.end()) groups.push_back(key);
    }

    std::ostringstream out;
    for (const auto& [setting, p] : groups) {
        std::vector<const BenchCell*> cells;
        std::vector<std::size_t> n0s;
        std::vector<std::string> methods;
        for (const auto& c : report.cells) {
            if (c.setting != setting || c.p != p) continue;
            cells.push_back(&c);
            if (std::find(n0s.begin(), n0s.end(), c.n0) == n0s.end()) n0s.push_back(c.n0);
            if (std::find(methods.begin(), methods.end(), c.method) == methods.end())
                methods.push_back(c.method);
        }
        auto find_cell = [&](std::size_t n0, const std::string& method) -> const BenchCell* {
            for (const auto* c : cells)
                if (c->n0 == n0 && c->method == method) return c;
            return nullptr;
        };
        for (int metric = 0; metric < 2; ++metric) {
            out << "Simulation setting " << setting << ": average "
                << (metric == 0 ? "AUC" : "AUPRC") << " (and standard error), p=" << p
                << ", n1=" << cells.front()->n1 << ", " << report.repetitions
                << " repetitions\n";
            out << "      n0";
            for (const auto& m : methods) out << "  " << std::setw(16) << std::left << m;
            out << "\n";
            for (auto n0 : n0s) {
                out << std::setw(8) << std::right << n0;
                for (const auto& m : methods) {
                    const BenchCell* c = find_cell(n0, m);
                    std::string v = "-";
                    if (c)
                        v = metric == 0 ? paper_style(c->auc_mean, c->auc_se)
                                        : paper_style(c->auprc_mean, c->auprc_se);
                    out << "  " << std::setw(16) << std::left << v;
                }
                out << "\n";
            }
            out << "\n";
        }
    }
    return out.str();
}

}  // namespace skewguard
