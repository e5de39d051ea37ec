#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

#include "pitcal/special.hpp"

namespace pitcal {

/// splitmix64 finalizer; mixes seeds and tags into well-separated stream keys.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Deterministic random stream. All randomness in the library flows from one
/// master seed through named substreams; there is no global RNG state. The
/// variate transforms are hand-rolled (not std::*_distribution) so the byte
/// streams are identical across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Independent stream derived from (seed, tags...); tag order matters.
    static Rng substream(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
        std::uint64_t h = mix64(seed ^ 0x5bf0363b5ea8c3d6ULL);
        for (std::uint64_t t : tags) h = mix64(h ^ t);
        return Rng(h);
    }

    /// FNV-1a hash for naming substreams by string.
    static std::uint64_t tag(std::string_view name) {
        std::uint64_t h = 1469598103934665603ULL;
        for (char c : name) {
            h ^= static_cast<unsigned char>(c);
            h *= 1099511628211ULL;
        }
        return h;
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0,1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on (0,1); safe as a quantile-function argument.
    double uniform_open01() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via the inverse CDF (deterministic, no rejection).
    double normal() { return std_normal_quantile(uniform_open01()); }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return engine_() % n; }

private:
    std::mt19937_64 engine_;
};

} // namespace pitcal
