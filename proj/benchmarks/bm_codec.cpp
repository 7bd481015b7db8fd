#include "synchrocal/ingest.hpp"

#include <benchmark/benchmark.h>

using namespace synchrocal;

namespace {

void BM_FrameRoundTrip(benchmark::State& state)
{
    FrameConfig c;
    c.num_phasors = 3;
    DataFrame f;
    f.phasors = {{0.7071, 0.0}, {0.7071, -120.0}, {0.7071, 120.0}};
    f.freq = 60.0;
    for (auto _ : state)
        benchmark::DoNotOptimize(decode_data_frame(encode_data_frame(f, c), c));
}

void BM_Crc(benchmark::State& state)
{
    const std::vector<std::uint8_t> bytes(static_cast<std::size_t>(state.range(0)), 0x5A);
    for (auto _ : state)
        benchmark::DoNotOptimize(crc16_ccitt(bytes));
    state.SetBytesProcessed(state.iterations() * state.range(0));
}

} // namespace

BENCHMARK(BM_FrameRoundTrip);
BENCHMARK(BM_Crc)->Arg(64)->Arg(4096);
