#pragma once

// Deterministic seeded randomness.  Every consumer derives an independent
// substream from (seed, stream index) so results are bit-identical however
// the work is ordered or parallelized, and a content digest for manifests.

#include <cstdint>

namespace wft {

/// splitmix64: tiny, well-mixed 64-bit generator.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform on [0, 1).
    double next_double() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    /// +1 or -1 with equal probability.
    double next_sign() { return (next() & 1u) ? 1.0 : -1.0; }

    /// Uniform integer in [0, bound) by rejection (bound > 0).
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t limit = ~0ULL - ~0ULL % bound;
        std::uint64_t v;
        do { v = next(); } while (v >= limit);
        return v % bound;
    }

private:
    std::uint64_t state_;
};

/// Independent substream for (seed, stream): results depend only on the pair,
/// never on evaluation order.
inline SplitMix64 substream(std::uint64_t seed, std::uint64_t stream) {
    SplitMix64 mixer(seed ^ (0x6a09e667f3bcc909ULL + stream * 0x9e3779b97f4a7c15ULL));
    mixer.next();
    return mixer;
}

/// FNV-1a 64-bit content digest.
inline std::uint64_t fnv1a64(const void* data, std::uint64_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::uint64_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace wft
