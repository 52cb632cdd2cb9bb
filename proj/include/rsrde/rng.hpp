#pragma once

#include <cmath>
#include <cstdint>

namespace rsrde {

/// SplitMix64 stream. Trials get independent streams derived by mixing a
/// root seed with counter words, so a (seed, counter...) tuple maps to the
/// same sequence no matter how work is scheduled across threads.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// uniform in [0, 1)
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// uniform integer in [0, bound), bound > 0; rejection avoids modulo bias
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    /// standard normal via Marsaglia's polar method
    double next_gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, r2;
        do {
            u = 2.0 * next_double() - 1.0;
            v = 2.0 * next_double() - 1.0;
            r2 = u * u + v * v;
        } while (r2 >= 1.0 || r2 == 0.0);
        const double scale = std::sqrt(-2.0 * std::log(r2) / r2);
        spare_ = v * scale;
        has_spare_ = true;
        return u * scale;
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}
}  // namespace detail

/// Counter-based stream derivation: (root, a, b) -> stream. Distinct counter
/// tuples give statistically independent streams.
inline RngStream derive_stream(std::uint64_t root_seed, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t h = detail::mix64(root_seed ^ 0x8A5CD789635D2DFFull);
    h = detail::mix64(h ^ (a * 0x9E3779B97F4A7C15ull + 0x0D742FB1ull));
    h = detail::mix64(h ^ (b * 0xD1342543DE82EF95ull + 0x9F7C53ull));
    return RngStream(h);
}

}  // namespace rsrde
