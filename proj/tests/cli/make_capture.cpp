// Writes a steady three-phase data-frame capture with a small angle bias
// and Gaussian jitter, for exercising `synchrocal ingest --frames`.

#include "synchrocal/ingest.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <random>

int main(int argc, char** argv)
{
    if (argc != 3) {
        std::cerr << "usage: synchrocal_make_capture OUT.bin FRAME.cfg\n";
        return 1;
    }
    using namespace synchrocal;
    const FrameConfig cfg = FrameConfig::load(argv[2]);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> jitter(0.0, 0.008);
    std::ofstream out(argv[1], std::ios::binary);
    const std::uint32_t ticks = cfg.time_base / static_cast<std::uint32_t>(cfg.data_rate);
    for (std::uint32_t i = 0; i < 600; ++i) {
        DataFrame f;
        f.soc = 1'700'000'000 + i / 30;
        f.fracsec = (i % 30) * ticks;
        f.freq = cfg.nominal_frequency;
        const double e = 0.36 + jitter(rng);
        for (double offset : {0.0, -120.0, 120.0})
            f.phasors.push_back({1.0 / std::sqrt(2.0), offset - e});
        const auto bytes = encode_data_frame(f, cfg);
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    }
    return out ? 0 : 1;
}
