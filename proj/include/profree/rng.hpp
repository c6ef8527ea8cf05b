#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

namespace profree {

// Deterministic 64-bit generator (splitmix64). Every seeded operation in the
// library draws from this so that results are reproducible across platforms
// and standard library versions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, bound), unbiased by rejection.
    std::uint64_t below(std::uint64_t bound) {
        if (bound <= 1) return 0;
        std::uint64_t limit = ~std::uint64_t(0) - (~std::uint64_t(0) % bound);
        std::uint64_t x;
        do {
            x = next();
        } while (x >= limit);
        return x % bound;
    }

    int int_below(int bound) { return static_cast<int>(below(static_cast<std::uint64_t>(bound))); }

    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Independent stream derived from (seed, index); used to make per-trial
    // results order-independent.
    static Rng stream(std::uint64_t seed, std::uint64_t index) {
        Rng mix(seed ^ (index * 0x9e3779b97f4a7c15ull + 0x2545f4914f6cdd1dull));
        std::uint64_t s = mix.next();
        return Rng(s);
    }

private:
    std::uint64_t state_;
};

// Uniform k-subset of `pool` by partial Fisher-Yates shuffle; returns the
// chosen elements in selection order.
inline std::vector<int> sample_k_subset(Rng& rng, int k, std::vector<int> pool) {
    std::vector<int> out;
    out.reserve(k);
    int avail = static_cast<int>(pool.size());
    for (int i = 0; i < k && avail > 0; ++i, --avail) {
        int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(avail)));
        std::swap(pool[j], pool[avail - 1]);
        out.push_back(pool[avail - 1]);
    }
    return out;
}

} // namespace profree
