// rng.hpp — named, versioned deterministic random number generation
//
// Stream: std::mt19937_64 (bit-exact across platforms by the C++ standard),
// doubles taken as the top 53 bits of each draw. Seed derivation mixes the
// master seed and a stream index through splitmix64 so that neighbouring
// indices give statistically independent streams. Changing any of this is a
// breaking change to reproducibility; bump kRngVersion if you do.
#pragma once

#include <cstdint>
#include <random>

namespace modal {

inline constexpr const char* kRngVersion = "mt19937_64/splitmix64-v1";

// splitmix64 finalizer (public-domain construction, widely used for seeding).
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Per-trajectory seed: two splitmix rounds keep low-entropy (seed, index)
// pairs from colliding.
constexpr std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return splitmix64(splitmix64(master) ^ splitmix64(index + 0x9E3779B97F4A7C15ULL));
}

class Rng {
public:
    Rng() : engine_(0) {}
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform in [0, 1) with 53 bits of precision. Hand-rolled because
    // std::uniform_real_distribution is not bit-specified by the standard.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    std::uint64_t next_u64() { return engine_(); }

    bool operator==(const Rng& other) const { return engine_ == other.engine_; }

private:
    std::mt19937_64 engine_;
};

}  // namespace modal
