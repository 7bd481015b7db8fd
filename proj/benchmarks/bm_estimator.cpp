#include "synchrocal/estimator.hpp"
#include "synchrocal/signals.hpp"

#include <benchmark/benchmark.h>

using namespace synchrocal;

namespace {

// One repeat's worth of reports (6000) through the three-phase estimator.
void BM_RunEstimator(benchmark::State& state, ProfileClass cls)
{
    const auto spec = TestSignalSpec::for_test(TestType::PM, PmuClass::P, 200.0);
    const auto profile = EstimatorProfile::for_class(cls);
    const auto margin = static_cast<std::int64_t>(profile.window_length(spec.sample_rate) / 2 + 1);
    const std::size_t count = spec.sample_count() + 2 * static_cast<std::size_t>(margin);
    const PhaseTriple waves{synthesize_waveform(spec, Phase::A, -margin, count),
                            synthesize_waveform(spec, Phase::B, -margin, count),
                            synthesize_waveform(spec, Phase::C, -margin, count)};
    for (auto _ : state)
        benchmark::DoNotOptimize(run_estimator(waves, profile, spec.report_rate));
    state.SetItemsProcessed(state.iterations() * 3 * static_cast<std::int64_t>(spec.report_count()));
}

void BM_Synthesize(benchmark::State& state)
{
    const auto spec = TestSignalSpec::for_test(TestType::FrUp, PmuClass::P, 200.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(synthesize_waveform(spec, Phase::A));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(spec.sample_count()));
}

} // namespace

BENCHMARK_CAPTURE(BM_RunEstimator, p_class, ProfileClass::P)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_RunEstimator, m_class, ProfileClass::M)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Synthesize)->Unit(benchmark::kMillisecond);
