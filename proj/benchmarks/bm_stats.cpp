#include "synchrocal/random.hpp"
#include "synchrocal/stats.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace synchrocal;

namespace {

std::vector<double> mixture(std::size_t n, std::size_t peaks)
{
    SplitMix64 rng(42);
    std::normal_distribution<double> z(0.0, 0.05);
    std::vector<double> x(n);
    for (double& v : x)
        v = static_cast<double>(rng() % peaks) + z(rng);
    return x;
}

void BM_Moments(benchmark::State& state)
{
    const auto x = mixture(static_cast<std::size_t>(state.range(0)), 2);
    for (auto _ : state)
        benchmark::DoNotOptimize(moments(x));
}

void BM_ShapiroWilk(benchmark::State& state)
{
    const auto x = mixture(static_cast<std::size_t>(state.range(0)), 2);
    for (auto _ : state)
        benchmark::DoNotOptimize(shapiro_wilk(x));
}

void BM_KsGaussian(benchmark::State& state)
{
    const auto x = mixture(static_cast<std::size_t>(state.range(0)), 2);
    for (auto _ : state)
        benchmark::DoNotOptimize(ks_gaussian(x));
}

void BM_SelectGmmOrder(benchmark::State& state)
{
    const auto x = mixture(18000, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(select_gmm_order(x, 6, 0));
}

} // namespace

BENCHMARK(BM_Moments)->Arg(18000);
BENCHMARK(BM_ShapiroWilk)->Arg(5000)->Arg(18000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KsGaussian)->Arg(18000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SelectGmmOrder)->Arg(1)->Arg(2)->Arg(5)->Unit(benchmark::kMillisecond)->Iterations(1);
