#include <benchmark/benchmark.h>

#include <vector>

#include "skewguard/logit.hpp"
#include "skewguard/metrics.hpp"
#include "skewguard/rng.hpp"

using namespace skewguard;

namespace {

void scored_sample(std::size_t n, std::vector<double>& scores, std::vector<int>& labels) {
    RngStream rng(5);
    scores.resize(n);
    labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        labels[i] = rng.next_below(10) == 0 ? 1 : 0;
        scores[i] = rng.next_normal() + (labels[i] ? 0.8 : 0.0);
    }
    labels[0] = 1;
    labels[1] = 0;
}

}  // namespace

static void BM_RocAuc(benchmark::State& state) {
    std::vector<double> scores;
    std::vector<int> labels;
    scored_sample(static_cast<std::size_t>(state.range(0)), scores, labels);
    for (auto _ : state) benchmark::DoNotOptimize(roc_auc(scores, labels));
}
BENCHMARK(BM_RocAuc)->Arg(300)->Arg(3000)->Arg(300000)->Unit(benchmark::kMicrosecond);

static void BM_PrAuprc(benchmark::State& state) {
    std::vector<double> scores;
    std::vector<int> labels;
    scored_sample(static_cast<std::size_t>(state.range(0)), scores, labels);
    for (auto _ : state) benchmark::DoNotOptimize(pr_auprc(scores, labels));
}
BENCHMARK(BM_PrAuprc)->Arg(300)->Arg(3000)->Arg(300000)->Unit(benchmark::kMicrosecond);

static void BM_FitLogit(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const std::size_t p = 10;
    RngStream rng(6);
    Matrix x(n, p);
    for (auto& v : x.data()) v = rng.next_normal();
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = x(i, 0) + rng.next_normal() > 1.5 ? 1 : 0;
    y[0] = 1;
    y[1] = 0;
    for (auto _ : state) benchmark::DoNotOptimize(fit_logit(x, y));
}
BENCHMARK(BM_FitLogit)->Arg(1000)->Arg(7700)->Unit(benchmark::kMillisecond);
