#pragma once

#include <cstdint>

namespace mbpcn {

// SplitMix64: the fixed update/output function keeps seeded meshes and
// initial data bit-reproducible across platforms and languages.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // uniform on [0,1), 53-bit resolution
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // uniform on [-1,1)
    double next_symmetric() { return 2.0 * next_unit() - 1.0; }

private:
    std::uint64_t state_;
};

} // namespace mbpcn
