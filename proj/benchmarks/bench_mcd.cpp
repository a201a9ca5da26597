#include <benchmark/benchmark.h>

#include "skewguard/mcd.hpp"
#include "skewguard/numkit.hpp"
#include "skewguard/rng.hpp"

using namespace skewguard;

namespace {

Matrix contaminated_sample(std::size_t n, std::size_t p, RngStream& rng) {
    Matrix x(n, p);
    for (auto& v : x.data()) v = rng.next_normal();
    for (std::size_t i = 0; i < n / 10; ++i) x(i, 0) += 20.0;
    return x;
}

}  // namespace

static void BM_FastMcd(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto p = static_cast<std::size_t>(state.range(1));
    RngStream data_rng(1);
    const Matrix x = contaminated_sample(n, p, data_rng);
    for (auto _ : state) {
        RngStream rng(7);
        benchmark::DoNotOptimize(fast_mcd(x, {}, rng));
    }
}
BENCHMARK(BM_FastMcd)->Args({70, 5})->Args({70, 10})->Args({100, 10})->Args({500, 10})
    ->Unit(benchmark::kMillisecond);

static void BM_CStep(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    RngStream data_rng(2);
    const Matrix x = contaminated_sample(n, 10, data_rng);
    const auto mu = column_means(x);
    const SymMatrix cov = sample_covariance(x, mu);
    const std::size_t h = mcd_subset_size(n, 10, 0.5);
    for (auto _ : state) benchmark::DoNotOptimize(c_step(x, mu, cov, h));
}
BENCHMARK(BM_CStep)->Arg(70)->Arg(500)->Arg(5000);
