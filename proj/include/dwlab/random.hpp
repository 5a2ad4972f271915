#pragma once

// Seeded random streams. Every random draw in the library flows from a single
// 64-bit seed split into named sub-streams, so results are reproducible across
// runs and independent of call order between streams.

#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>

namespace dwlab {

/// FNV-1a, used to turn a stream name into a salt.
constexpr std::uint64_t hash_name(std::string_view name) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : name) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// SplitMix64 finalizer; mixes seed and salt into a well-spread 64-bit value.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) noexcept {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Thin wrapper over mt19937_64 with portable real conversions.
///
/// The standard distributions are implementation-defined, so uniform reals are
/// built directly from the 53 high bits of the engine output.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Sub-stream keyed by name: `Rng::stream(seed, "sampling")`.
    static Rng stream(std::uint64_t seed, std::string_view name) {
        return Rng(mix_seed(seed, hash_name(name)));
    }

    /// Sub-stream keyed by name and index, e.g. one per trial.
    static Rng stream(std::uint64_t seed, std::string_view name, std::uint64_t index) {
        return Rng(mix_seed(mix_seed(seed, hash_name(name)), index));
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform angle in [0, 2pi).
    double angle() { return 2.0 * std::numbers::pi * uniform(); }

    /// Uniform (Lebesgue) point in the Euclidean disc |z| < radius.
    std::complex<double> in_disc(double radius) {
        return std::polar(radius * std::sqrt(uniform()), angle());
    }

    std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }

private:
    std::mt19937_64 engine_;
};

}  // namespace dwlab
