#pragma once

// Seeded, platform-independent randomness with counter-based substreams.
//
// Every resampling routine derives one substream per draw index from
// (seed, stream label, draw index), so results do not depend on evaluation
// order or thread scheduling. No std library distributions are used; their
// output is implementation-defined.

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace provbench {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace detail

// One independent draw sequence. SplitMix64 core; passes through a fixed
// warm-up mix so nearby stream keys do not correlate.
class Substream {
public:
    explicit Substream(std::uint64_t key) : state_(key) {
        state_ = detail::splitmix64(state_);
        state_ = detail::splitmix64(state_);
    }

    std::uint64_t next_u64() { return detail::splitmix64(state_); }

    // Uniform integer in [0, bound) by rejection; bound must be > 0.
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller (explicit formula, deterministic).
    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = next_double();
        } while (u1 <= 0.0);
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    // In-place Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(values[i - 1], values[j]);
        }
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Named random source: a (seed, label) pair that mints independent
// substreams by draw counter. Identical (seed, label) reproduce identical
// sequences on every platform.
class RandomSource {
public:
    RandomSource(std::uint64_t seed, std::string label)
        : seed_(seed), label_(std::move(label)) {}

    std::uint64_t seed() const noexcept { return seed_; }
    const std::string& label() const noexcept { return label_; }

    Substream substream(std::uint64_t draw_index) const {
        std::uint64_t key = seed_ ^ detail::fnv1a64(label_);
        key = detail::splitmix64(key);
        key ^= 0x632be59bd9b4e019ULL * (draw_index + 1);
        return Substream(key);
    }

    // A derived source for a sub-phase (e.g. "permutation", "bootstrap").
    RandomSource fork(std::string_view sublabel) const {
        return RandomSource(seed_, label_ + "/" + std::string(sublabel));
    }

private:
    std::uint64_t seed_;
    std::string label_;
};

} // namespace provbench
