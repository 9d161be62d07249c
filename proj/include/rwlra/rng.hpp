#pragma once

#include <cmath>
#include <cstdint>

namespace rwlra {

/// splitmix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

/// Stateless hash of (key, index). The same pair always yields the same word,
/// which is what makes sketch realization a pure function of (seed, position).
constexpr std::uint64_t hash_index(std::uint64_t key, std::uint64_t index) {
    return mix64(key + kGolden * (index + 1));
}

/// Map a word to [0, bound) without modulo bias (Lemire multiply-shift).
constexpr std::uint64_t bounded(std::uint64_t word, std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(word) * bound) >> 64);
}

/// Counter-based generator: every draw is a pure function of
/// (seed, stream, counter). Streams can be split per column / per cell and
/// replayed independently, so parallel realization and sequential realization
/// produce bit-identical values.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(mix64(seed ^ hash_index(0x5851f42d4c957f2dULL, stream))) {}

    std::uint64_t next_u64() { return hash_index(key_, counter_++); }

    /// Uniform in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [0, bound).
    std::uint64_t next_below(std::uint64_t bound) {
        return bounded(next_u64(), bound);
    }

    /// Standard normal via Box-Muller. Avoids std::normal_distribution, whose
    /// output is implementation-defined and would break bit-for-bit replay.
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = next_double();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        const double u2 = next_double();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * 3.14159265358979323846 * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace rwlra
