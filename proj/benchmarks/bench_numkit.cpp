#include <benchmark/benchmark.h>

#include "skewguard/numkit.hpp"
#include "skewguard/rng.hpp"

using namespace skewguard;

namespace {

SymMatrix random_spd(std::size_t p, RngStream& rng) {
    Matrix a(p, p);
    for (auto& v : a.data()) v = rng.next_normal();
    Matrix prod(p, p);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j) {
            double s = (i == j) ? 1e-3 : 0.0;
            for (std::size_t k = 0; k < p; ++k) s += a(k, i) * a(k, j);
            prod(i, j) = s;
        }
    return SymMatrix::from_matrix(prod, 1e-9);
}

}  // namespace

static void BM_Cholesky(benchmark::State& state) {
    RngStream rng(1);
    const SymMatrix m = random_spd(static_cast<std::size_t>(state.range(0)), rng);
    for (auto _ : state) benchmark::DoNotOptimize(cholesky(m));
}
BENCHMARK(BM_Cholesky)->Arg(5)->Arg(10)->Arg(30);

static void BM_Chi2Quantile(benchmark::State& state) {
    double prob = 0.5;
    for (auto _ : state) {
        prob = prob < 0.999 ? prob + 1e-4 : 0.5;
        benchmark::DoNotOptimize(chi2_quantile(static_cast<unsigned>(state.range(0)), prob));
    }
}
BENCHMARK(BM_Chi2Quantile)->Arg(2)->Arg(10);

static void BM_MvnSample(benchmark::State& state) {
    const std::size_t p = static_cast<std::size_t>(state.range(0));
    RngStream rng(2);
    const Matrix L = cholesky(random_spd(p, rng));
    const std::vector<double> center(p, 0.0);
    RngStream draw_rng(3);
    for (auto _ : state) benchmark::DoNotOptimize(mvn_sample(center, L, draw_rng));
}
BENCHMARK(BM_MvnSample)->Arg(5)->Arg(10)->Arg(30);

static void BM_NormalDraws(benchmark::State& state) {
    RngStream rng(4);
    for (auto _ : state) benchmark::DoNotOptimize(rng.next_normal());
}
BENCHMARK(BM_NormalDraws);
