#include <benchmark/benchmark.h>

#include "skewguard/resample.hpp"
#include "skewguard/simbench.hpp"

using namespace skewguard;

namespace {

Dataset training_set(std::size_t n0, std::size_t n1, std::size_t p) {
    SimSpec spec = make_sim_spec(2, n0, p);
    spec.n1 = n1;
    RngStream rng(11);
    Dataset d = gen_setting(spec, rng);
    RngStream contam_rng(12);
    return contaminate(d, spec, contam_rng);
}

}  // namespace

static void BM_Oversample(benchmark::State& state) {
    const Method method = static_cast<Method>(state.range(0));
    const Dataset d = training_set(630, 70, static_cast<std::size_t>(state.range(1)));
    OversampleConfig cfg;
    cfg.target = 10;
    for (auto _ : state) {
        RngStream rng(3);
        benchmark::DoNotOptimize(oversample(d, method, cfg, rng));
    }
}
BENCHMARK(BM_Oversample)
    ->Args({static_cast<int>(Method::Smote), 10})
    ->Args({static_cast<int>(Method::Rose), 10})
    ->Args({static_cast<int>(Method::RobRose), 5})
    ->Args({static_cast<int>(Method::RobRose), 10})
    ->Unit(benchmark::kMillisecond);

static void BM_BenchRepetition(benchmark::State& state) {
    // one full protocol repetition: generate, split, contaminate, 4 arms
    SimSpec spec = make_sim_spec(2, static_cast<std::size_t>(state.range(0)), 10);
    spec.repetitions = 1;
    const std::vector<std::string> methods{kMethodImbalanced, "smote", "rose", "robrose"};
    std::uint64_t seed = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(run_benchmark({spec}, methods, OversampleConfig{}, seed++, 1));
}
BENCHMARK(BM_BenchRepetition)->Arg(900)->Arg(9900)->Unit(benchmark::kMillisecond);
