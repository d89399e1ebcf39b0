#pragma once

#include "orblab/types.hpp"

#include <cstdint>

namespace orblab {

/// splitmix64: tiny, seedable, identical on every platform.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// uniform in [0, 1)
    Scalar uniform01() { return static_cast<Scalar>(next() >> 11) * 0x1.0p-53; }

    Scalar uniform(Scalar a, Scalar b) { return a + (b - a) * uniform01(); }

    /// standard normal via Box-Muller
    Scalar normal() {
        const Scalar u = std::max(uniform01(), 1e-300);
        const Scalar v = uniform01();
        return std::sqrt(-2 * std::log(u)) * std::cos(TWO_PI * v);
    }

private:
    std::uint64_t state_;
};

/// Substream derivation: every consumer of randomness hashes the master
/// seed with its stream index, so one knob controls a whole run.
inline std::uint64_t derive_stream(std::uint64_t master, std::uint64_t stream) {
    SplitMix64 mix(master ^ (0x9E3779B97F4A7C15ULL * (stream + 1)));
    return mix.next();
}

} // namespace orblab
