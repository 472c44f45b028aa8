#pragma once

#include <cstdint>
#include <span>

namespace rfsizer {

// splitmix64: tiny, seed-stable across platforms and builds. Every seeded
// behavior in the toolkit (splits, bootstrap, init, dropout) routes through
// this generator so reruns are bit-identical.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform in [lo, hi).
    double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    // Unbiased uniform integer in [0, n) via rejection sampling.
    std::uint64_t next_below(std::uint64_t n) {
        const std::uint64_t threshold = -n % n;  // 2^64 mod n
        for (;;) {
            std::uint64_t r = next();
            if (r >= threshold) return r % n;
        }
    }

    // Decorrelated stream for sub-tasks (per-tree, per-target, ...).
    SplitMix64 fork(std::uint64_t salt) {
        return SplitMix64(next() ^ (0xD1B54A32D192ED03ull * (salt + 1)));
    }

private:
    std::uint64_t state_;
};

template <typename T>
void shuffle_in_place(std::span<T> items, SplitMix64& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng.next_below(i));
        std::swap(items[i - 1], items[j]);
    }
}

}  // namespace rfsizer
