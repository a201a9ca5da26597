// skewguard: robust minority-class oversampling (robROSE), SMOTE/ROSE
// baselines, imbalance-aware evaluation, and the simulation benchmark.

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "skewguard/csv.hpp"
#include "skewguard/dataset.hpp"
#include "skewguard/logit.hpp"
#include "skewguard/metrics.hpp"
#include "skewguard/resample.hpp"
#include "skewguard/simbench.hpp"

namespace sg = skewguard;

namespace {

// 0 success, 1 usage, 2 data error, 3 numerical/benchmark failure
int exit_code_for(sg::Errc c) {
    switch (c) {
        case sg::Errc::ParseError:
        case sg::Errc::MissingValue:
        case sg::Errc::NonBinaryLabel:
        case sg::Errc::ZeroScaleColumn:
        case sg::Errc::IoError:
        case sg::Errc::InvalidLabeling:
        case sg::Errc::LengthMismatch:
        case sg::Errc::DimensionMismatch:
        case sg::Errc::OneClassOnly:
        case sg::Errc::NoPositives:
        case sg::Errc::InvalidArgument:
        case sg::Errc::InvalidProbability:
        case sg::Errc::InvalidDimension:
            return 2;
        default:
            return 3;
    }
}

sg::ScalingMode scaling_from_string(const std::string& s) {
    if (s == "none") return sg::ScalingMode::None;
    if (s == "standard") return sg::ScalingMode::Standard;
    if (s == "robust") return sg::ScalingMode::Robust;
    sg::raise(sg::Errc::InvalidArgument, "unknown scaling mode '" + s + "'");
}

int thread_budget(int requested) {
    int threads = requested;
    if (const char* env = std::getenv("SKEWGUARD_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) threads = (threads > 0) ? std::min(threads, cap) : cap;
    }
    return threads;
}

// Flat `key = value` config file; '#' starts a comment. Values become
// ordinary command-line tokens injected BEFORE the user's flags, so explicit
// flags always win (every option takes the last occurrence).
std::vector<std::string> config_file_tokens(const std::string& path) {
    std::ifstream in(path);
    if (!in) sg::raise(sg::Errc::IoError, "cannot open config file '" + path + "'");
    std::vector<std::string> tokens;
    std::string line;
    auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            sg::raise(sg::Errc::ParseError, "config line " + std::to_string(lineno) +
                                                ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            sg::raise(sg::Errc::ParseError,
                      "config line " + std::to_string(lineno) + ": empty key");
        if (value.empty())
            sg::raise(sg::Errc::ParseError,
                      "config line " + std::to_string(lineno) + ": empty value");
        // inline form works uniformly for options and for boolean flags
        tokens.push_back("--" + key + "=" + value);
    }
    return tokens;
}

// Rebuilds argv with the config file's tokens spliced in right after the
// subcommand name.
std::vector<std::string> splice_config(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    std::string config_path;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            config_path = args[i + 1];
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            config_path = args[i].substr(9);
            break;
        }
    }
    if (config_path.empty()) return args;
    const auto tokens = config_file_tokens(config_path);
    for (std::size_t i = 1; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a == "oversample" || a == "evaluate" || a == "bench" || a == "simulate") {
            args.insert(args.begin() + static_cast<std::ptrdiff_t>(i) + 1, tokens.begin(),
                        tokens.end());
            break;
        }
    }
    return args;
}

struct IoFlags {
    std::string label = "class";
    std::vector<std::string> categorical;
    std::vector<std::string> drop;
    std::vector<std::string> log1p;
    std::string scaling = "none";
};

void add_io_flags(CLI::App* cmd, IoFlags& io) {
    cmd->add_option("--label", io.label, "Name of the binary label column")
        ->capture_default_str();
    cmd->add_option("--categorical", io.categorical,
                    "Columns to treat as categorical (comma-separated)")
        ->delimiter(',');
    cmd->add_option("--drop", io.drop, "Columns to drop on ingestion")->delimiter(',');
    cmd->add_option("--log1p", io.log1p, "Columns to replace by log(1+value) on ingestion")
        ->delimiter(',');
    cmd->add_option("--scaling", io.scaling, "Feature scaling: none|standard|robust")
        ->check(CLI::IsMember({"none", "standard", "robust"}))
        ->capture_default_str();
}

sg::CsvReadOptions read_options(const IoFlags& io) {
    sg::CsvReadOptions opt;
    opt.label_column = io.label;
    opt.categorical_columns = io.categorical;
    opt.drop_columns = io.drop;
    opt.log1p_columns = io.log1p;
    return opt;
}

struct OversampleFlags {
    std::string method = "robrose";
    double target = 10.0;
    double shrink = 0.5;
    double cutoff = 0.999;
    int k = 5;
    bool smoothing_n_total = false;
    bool mcd_raw = false;
    int mcd_starts = 500;
};

void add_oversample_flags(CLI::App* cmd, OversampleFlags& os, bool with_none) {
    auto* opt = cmd->add_option("--method", os.method,
                                with_none ? "Oversampler: none|smote|rose|robrose"
                                          : "Oversampler: smote|rose|robrose");
    if (with_none) {
        os.method = "none";
        opt->check(CLI::IsMember({"none", "smote", "rose", "robrose"}));
    } else {
        opt->check(CLI::IsMember({"smote", "rose", "robrose"}));
    }
    opt->capture_default_str();
    cmd->add_option("--target", os.target,
                    "Desired minority size as a multiple m of the original count")
        ->capture_default_str();
    cmd->add_option("--shrink", os.shrink, "Kernel tuning constant h")->capture_default_str();
    cmd->add_option("--cutoff", os.cutoff, "Outlier cutoff probability for robROSE")
        ->capture_default_str();
    cmd->add_option("--k", os.k, "SMOTE neighbour count")->capture_default_str();
    cmd->add_flag("--smoothing-n-total", os.smoothing_n_total,
                  "Use the total row count instead of the minority count in the kernel constant");
    cmd->add_flag("--mcd-raw", os.mcd_raw, "Use the raw (unweighted) MCD fit in robROSE");
    cmd->add_option("--mcd-starts", os.mcd_starts, "Random elemental starts for FastMCD")
        ->capture_default_str();
}

sg::OversampleConfig oversample_config(const OversampleFlags& os, std::uint64_t seed) {
    sg::OversampleConfig cfg;
    cfg.target = os.target;
    cfg.shrink = os.shrink;
    cfg.cutoff_prob = os.cutoff;
    cfg.k_neighbors = os.k;
    cfg.seed = seed;
    cfg.smoothing_n_total = os.smoothing_n_total;
    cfg.mcd.reweight = !os.mcd_raw;
    cfg.mcd.n_starts = os.mcd_starts;
    return cfg;
}

void report_warnings(const sg::OversampleResult& result) {
    if (result.fell_back_to_rose)
        std::cerr << "warning: minority class too small for the MCD fit; "
                     "fell back to plain ROSE (no outlier exclusion)\n";
    if (result.duplicated_single)
        std::cerr << "warning: a single minority row cannot be interpolated; "
                     "synthetic rows are duplicates\n";
}

// ---- oversample ------------------------------------------------------------

int cmd_oversample(const std::string& input, const std::string& output, const IoFlags& io,
                   const OversampleFlags& os, std::uint64_t seed) {
    const sg::Dataset raw = sg::read_csv(input, read_options(io));
    sg::check_minority_labeling(raw);

    const sg::ScalingSpec spec = sg::fit_scaling(raw, scaling_from_string(io.scaling));
    const sg::Dataset scaled = sg::apply_scaling(raw, spec);

    sg::RngStream rng(seed);
    const sg::OversampleConfig cfg = oversample_config(os, seed);
    const sg::OversampleResult result =
        sg::oversample(scaled, sg::method_from_string(os.method), cfg, rng);
    report_warnings(result);

    std::cerr << "excluded " << result.excluded.size() << " minority outlier row(s)";
    if (!result.excluded.empty()) {
        std::cerr << ":";
        for (auto i : result.excluded) std::cerr << " " << i;
    }
    std::cerr << "\n";

    sg::Dataset rebalanced = sg::append_synthetic(scaled, result);
    rebalanced = sg::invert_scaling(rebalanced, spec);
    // original rows back to their exact input values
    for (std::size_t i = 0; i < raw.n(); ++i)
        for (std::size_t j = 0; j < raw.p(); ++j) rebalanced.X(i, j) = raw.X(i, j);

    sg::write_csv(rebalanced, output, {.provenance_column = true});
    std::cout << "wrote " << output << " (" << rebalanced.n() << " rows, "
              << result.Z.rows() << " synthetic)\n";
    return 0;
}

// ---- evaluate --------------------------------------------------------------

struct EvalOutcome {
    double auc = 0.0;
    double auprc = 0.0;
    sg::CurveReport roc;
    sg::CurveReport pr;
};

EvalOutcome evaluate_once(const sg::Dataset& train_raw, const sg::Dataset& test_raw,
                          const IoFlags& io, const OversampleFlags& os, std::uint64_t seed,
                          sg::RngStream rng) {
    const sg::ScalingSpec spec = sg::fit_scaling(train_raw, scaling_from_string(io.scaling));
    sg::Dataset train = sg::apply_scaling(train_raw, spec);
    const sg::Dataset test = sg::apply_scaling(test_raw, spec);

    if (os.method != "none") {
        const sg::OversampleConfig cfg = oversample_config(os, seed);
        const sg::OversampleResult result =
            sg::oversample(train, sg::method_from_string(os.method), cfg, rng);
        report_warnings(result);
        train = sg::append_synthetic(train, result);
    }

    const sg::LogitModel model = sg::fit_logit(train.X, train.y);
    if (!model.converged)
        std::cerr << "warning: logistic fit did not converge"
                  << (model.separation ? " (perfect separation)" : "") << "\n";
    const auto probs = sg::predict_proba(model, test.X);

    EvalOutcome out;
    out.roc = sg::roc_auc(probs, test.y);
    out.pr = sg::pr_auprc(probs, test.y);
    out.auc = out.roc.area;
    out.auprc = out.pr.area;
    return out;
}

int cmd_evaluate(const std::string& train_path, const std::string& test_path, const IoFlags& io,
                 const OversampleFlags& os, int cv_folds, int cv_repeats, std::uint64_t seed,
                 const std::string& curves_dir) {
    const sg::Dataset train_raw = sg::read_csv(train_path, read_options(io));

    if (cv_folds > 0) {
        if (!test_path.empty())
            sg::raise(sg::Errc::InvalidArgument, "give either a test file or --cv, not both");
        if (!train_raw.has_both_classes())
            sg::raise(sg::Errc::OneClassOnly, "cross-validation needs both classes");

        sg::RngStream root(seed);
        std::vector<double> aucs, auprcs;
        for (int rep = 0; rep < cv_repeats; ++rep) {
            sg::RngStream rep_rng = root.substream(static_cast<std::uint64_t>(rep));
            // stratified fold assignment: shuffle per class, deal round-robin
            std::vector<int> fold_of(train_raw.n(), 0);
            for (int label : {0, 1}) {
                auto idx = train_raw.rows_with_label(label);
                sg::RngStream shuffle_rng = rep_rng.substream(label);
                for (std::size_t i = idx.size() - 1; i > 0; --i) {
                    const std::size_t j = shuffle_rng.next_below(i + 1);
                    std::swap(idx[i], idx[j]);
                }
                for (std::size_t i = 0; i < idx.size(); ++i)
                    fold_of[idx[i]] = static_cast<int>(i % static_cast<std::size_t>(cv_folds));
            }
            for (int fold = 0; fold < cv_folds; ++fold) {
                std::vector<std::size_t> tr, te;
                for (std::size_t i = 0; i < train_raw.n(); ++i)
                    (fold_of[i] == fold ? te : tr).push_back(i);
                const sg::Dataset dtr = train_raw.select_rows(tr);
                const sg::Dataset dte = train_raw.select_rows(te);
                const EvalOutcome r = evaluate_once(dtr, dte, io, os, seed,
                                                    rep_rng.substream(100 + fold));
                aucs.push_back(r.auc);
                auprcs.push_back(r.auprc);
            }
        }
        auto mean_se = [](const std::vector<double>& v) {
            double mean = 0.0;
            for (double x : v) mean += x;
            mean /= static_cast<double>(v.size());
            double ss = 0.0;
            for (double x : v) ss += (x - mean) * (x - mean);
            const double se = v.size() > 1
                                  ? std::sqrt(ss / static_cast<double>(v.size() - 1)) /
                                        std::sqrt(static_cast<double>(v.size()))
                                  : 0.0;
            return std::pair{mean, se};
        };
        const auto [auc_m, auc_se] = mean_se(aucs);
        const auto [ap_m, ap_se] = mean_se(auprcs);
        std::cout << "auc " << sg::format_double(auc_m) << " se " << sg::format_double(auc_se)
                  << "\n";
        std::cout << "auprc " << sg::format_double(ap_m) << " se " << sg::format_double(ap_se)
                  << "\n";
        return 0;
    }

    if (test_path.empty())
        sg::raise(sg::Errc::InvalidArgument, "evaluate needs a test file or --cv");
    const sg::Dataset test_raw = sg::read_csv(test_path, read_options(io));
    sg::RngStream rng(seed);
    const EvalOutcome r = evaluate_once(train_raw, test_raw, io, os, seed, rng.substream(0));
    std::cout << "auc " << sg::format_double(r.auc) << "\n";
    std::cout << "auprc " << sg::format_double(r.auprc) << "\n";
    if (!curves_dir.empty()) {
        std::filesystem::create_directories(curves_dir);
        sg::write_curve_csv(r.roc, std::filesystem::path(curves_dir) / "roc.csv");
        sg::write_curve_csv(r.pr, std::filesystem::path(curves_dir) / "pr.csv");
    }
    return 0;
}

// ---- bench -----------------------------------------------------------------

int cmd_bench(const std::vector<int>& settings, const std::vector<std::size_t>& n0s,
              std::size_t p, std::size_t n1, int reps, double split, const OversampleFlags& os,
              std::uint64_t seed, int threads, const std::string& out_csv,
              const std::string& out_table) {
    std::vector<sg::SimSpec> grid;
    for (int setting : settings) {
        for (auto n0 : n0s) {
            sg::SimSpec spec = sg::make_sim_spec(setting, n0, p);
            spec.n1 = n1;
            spec.repetitions = reps;
            spec.split = split;
            grid.push_back(spec);
        }
    }
    const std::vector<std::string> methods{sg::kMethodImbalanced, "smote", "rose", "robrose"};
    const sg::OversampleConfig cfg = oversample_config(os, seed);
    const sg::BenchReport report =
        sg::run_benchmark(grid, methods, cfg, seed, thread_budget(threads));

    sg::write_bench_csv(report, out_csv);
    const std::string table = sg::format_bench_table(report);
    std::cout << table;
    if (!out_table.empty()) sg::write_file_atomic(out_table, table);
    std::cout << "wrote " << out_csv << "\n";
    return 0;
}

// ---- simulate ---------------------------------------------------------------

int cmd_simulate(const std::string& output, int setting, std::size_t n0, std::size_t n1,
                 std::size_t p, double contamination, std::uint64_t seed) {
    sg::SimSpec spec = sg::make_sim_spec(setting, n0, p);
    spec.n1 = n1;
    if (contamination >= 0.0) spec.contamination = contamination;
    spec.seed = seed;
    sg::RngStream rng(seed);
    sg::RngStream gen_rng = rng.substream(0);
    sg::Dataset d = sg::gen_setting(spec, gen_rng);
    if (spec.contamination > 0.0) {
        sg::RngStream contam_rng = rng.substream(2);
        d = sg::contaminate(d, spec, contam_rng);
    }
    sg::write_csv(d, output);
    std::cout << "wrote " << output << " (" << d.n() << " rows, p=" << d.p() << ")\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"skewguard: robust oversampling for imbalanced binary data"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    app.add_option("--seed", seed, "Master random seed (every run is reproducible)")
        ->capture_default_str();

    // oversample
    auto* over = app.add_subcommand("oversample", "Rebalance a CSV with synthetic minority rows");
    std::string over_in, over_out;
    over->add_option("input", over_in, "Input CSV")->required();
    over->add_option("output", over_out, "Output CSV (gets a 'synthetic' provenance column)")
        ->required();
    IoFlags over_io;
    add_io_flags(over, over_io);
    OversampleFlags over_os;
    add_oversample_flags(over, over_os, /*with_none=*/false);

    // evaluate
    auto* eval = app.add_subcommand(
        "evaluate", "Fit logistic regression on (optionally rebalanced) data and score a test set");
    std::string eval_train, eval_test, curves_dir;
    int cv_folds = 0, cv_repeats = 1;
    eval->add_option("train", eval_train, "Training CSV (or the full file under --cv)")
        ->required();
    eval->add_option("test", eval_test, "Test CSV (omit when using --cv)");
    eval->add_option("--cv", cv_folds, "Stratified k-fold cross-validation instead of a test file")
        ->capture_default_str();
    eval->add_option("--cv-repeats", cv_repeats, "Repetitions of the CV split")
        ->capture_default_str();
    eval->add_option("--curves", curves_dir, "Directory for roc.csv and pr.csv (single split only)");
    IoFlags eval_io;
    add_io_flags(eval, eval_io);
    OversampleFlags eval_os;
    add_oversample_flags(eval, eval_os, /*with_none=*/true);

    // bench
    auto* bench = app.add_subcommand("bench", "Reproduce the simulation benchmark tables");
    std::vector<int> settings{1, 2};
    std::vector<std::size_t> n0s{900, 1900, 9900};
    std::size_t bench_p = 10, bench_n1 = 100;
    int reps = 100, threads = 0;
    double split = 0.7;
    std::string out_csv = "bench_report.csv", out_table;
    bench->add_option("--setting", settings, "Simulation settings to run (1 = clean, 2 = outliers)")
        ->delimiter(',')
        ->capture_default_str();
    bench->add_option("--n0", n0s, "Majority sizes (minority fixed at --n1)")
        ->delimiter(',')
        ->capture_default_str();
    bench->add_option("--p", bench_p, "Feature dimension")->capture_default_str();
    bench->add_option("--n1", bench_n1, "Minority size")->capture_default_str();
    bench->add_option("--reps", reps, "Repetitions per grid cell")->capture_default_str();
    bench->add_option("--split", split, "Training fraction")->capture_default_str();
    bench->add_option("--threads", threads,
                      "Worker threads (0 = hardware; SKEWGUARD_THREADS caps this)")
        ->capture_default_str();
    bench->add_option("--out", out_csv, "Report CSV path")->capture_default_str();
    bench->add_option("--table", out_table, "Also write the aligned text table here");
    OversampleFlags bench_os;
    add_oversample_flags(bench, bench_os, /*with_none=*/false);

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Write one generated simulation dataset");
    std::string sim_out;
    int sim_setting = 1;
    std::size_t sim_n0 = 900, sim_n1 = 100, sim_p = 10;
    double sim_contamination = -1.0;
    simulate->add_option("output", sim_out, "Output CSV")->required();
    simulate->add_option("--setting", sim_setting, "1 = clean, 2 = minority outliers")
        ->capture_default_str();
    simulate->add_option("--n0", sim_n0, "Majority rows")->capture_default_str();
    simulate->add_option("--n1", sim_n1, "Minority rows")->capture_default_str();
    simulate->add_option("--p", sim_p, "Feature dimension")->capture_default_str();
    simulate->add_option("--contamination", sim_contamination,
                         "Minority outlier fraction (default: by setting)");

    // flat `key = value` config files; later (explicit) flags take precedence
    std::string config_path;
    for (auto* sub : {over, eval, bench, simulate}) {
        sub->add_option("--config", config_path,
                        "Flat 'key = value' config file; command-line flags override it");
        sub->fallthrough();  // lets the global --seed appear after the subcommand
        for (CLI::Option* opt : sub->get_options())
            if (!opt->get_positional())
                opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    }
    app.get_option("--seed")->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    std::vector<std::string> args;
    try {
        args = splice_config(argc, argv);
    } catch (const sg::Error& e) {
        std::cerr << "error[" << e.category() << "]: " << e.what() << "\n";
        return 1;
    }
    std::vector<char*> argp;
    argp.reserve(args.size());
    for (auto& a : args) argp.push_back(a.data());
    try {
        app.parse(static_cast<int>(argp.size()), argp.data());
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);  // prints the message or help text
        return rc == 0 ? 0 : 1;     // usage problems exit 1
    }

    try {
        if (over->parsed()) return cmd_oversample(over_in, over_out, over_io, over_os, seed);
        if (eval->parsed())
            return cmd_evaluate(eval_train, eval_test, eval_io, eval_os, cv_folds, cv_repeats,
                                seed, curves_dir);
        if (bench->parsed())
            return cmd_bench(settings, n0s, bench_p, bench_n1, reps, split, bench_os, seed,
                             threads, out_csv, out_table);
        if (simulate->parsed())
            return cmd_simulate(sim_out, sim_setting, sim_n0, sim_n1, sim_p, sim_contamination,
                                seed);
    } catch (const sg::Error& e) {
        std::cerr << "error[" << e.category() << "]: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error[Internal]: " << e.what() << "\n";
        return 3;
    }
    return 1;
}
