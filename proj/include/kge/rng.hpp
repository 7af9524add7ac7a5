#pragma once
// SplitMix64: small counter-style generator used wherever the trainer needs a
// stream that is cheap to construct per positive triple. Satisfies
// UniformRandomBitGenerator so it plugs into <random> distributions.

#include <cstdint>
#include <limits>

namespace kge {

class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit constexpr SplitMix64(std::uint64_t seed = 0) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

/// Child seed for stream `index` under `seed`: one SplitMix64 output of
/// (seed XOR golden-ratio-scaled index). Epoch e of a run uses mix_seed(seed, e).
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    SplitMix64 g(seed ^ (index * 0xD1B54A32D192ED03ULL));
    return g();
}

}  // namespace kge
