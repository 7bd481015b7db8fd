#pragma once

#include <cstdint>
#include <limits>

namespace synchrocal {

/// SplitMix64: small counter-style generator used wherever a random stream
/// must be derived from (seed, index) so results do not depend on evaluation order.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit constexpr SplitMix64(std::uint64_t state) noexcept : state_(state) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept
    {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

/// Combines a seed with stream/index identifiers into an independent sub-seed.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0) noexcept
{
    SplitMix64 g(seed ^ (stream * 0xD1B54A32D192ED03ULL));
    std::uint64_t s = g();
    SplitMix64 h(s ^ (index * 0x9E3779B97F4A7C15ULL + 0x632BE59BD9B4E019ULL));
    return h();
}

} // namespace synchrocal
