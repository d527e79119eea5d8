#pragma once

#include <array>
#include <cstdint>

namespace mpirecon {

/// Seeded xoshiro256** generator.
///
/// The state is expanded from the 64-bit seed with SplitMix64, so the stream
/// is fully determined by the seed on every platform. Not cryptographic.
class SeededGenerator {
public:
    explicit SeededGenerator(std::uint64_t seed);

    std::uint64_t next_u64();

    /// Uniform double in the open interval (0, 1), 53-bit resolution.
    double uniform_open();

    /// Two independent standard normal deviates (Box-Muller transform).
    std::array<double, 2> normal_pair();

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::array<std::uint64_t, 4> state_{};
};

inline std::array<double, 2> normal_pair(SeededGenerator& gen) { return gen.normal_pair(); }

}  // namespace mpirecon
