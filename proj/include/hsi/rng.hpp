#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace hsi {

// Seeded random source built on std::mt19937_64. The distributions are
// implemented here instead of taken from <random> because the standard
// leaves their algorithms unspecified; this keeps streams bit-identical
// across standard libraries, which the replay guarantees depend on.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t bits() { return eng_(); }

    // uniform in [0, 1) with 53-bit resolution
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // uniform in [lo, hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [0, n), unbiased via rejection
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n; // 2^64 mod n
        for (;;) {
            const std::uint64_t r = eng_();
            if (r >= threshold) return r % n;
        }
    }

    // standard normal, polar Box-Muller
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        has_spare_ = true;
        return u * m;
    }

    template <typename T>
    void fill_normal(std::span<T> out, double sigma = 1.0) {
        for (auto& x : out) x = static_cast<T>(sigma * normal());
    }

    // k distinct values from [0, n), partial Fisher-Yates; order is arbitrary
    // but deterministic.
    std::vector<std::int64_t> sample_distinct(std::int64_t n, std::int64_t k) {
        std::vector<std::int64_t> pool(static_cast<std::size_t>(n));
        for (std::int64_t i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
        for (std::int64_t i = 0; i < k; ++i) {
            const std::int64_t j = i + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(n - i)));
            std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
        }
        pool.resize(static_cast<std::size_t>(k));
        return pool;
    }

    // Mixes two values into a fresh seed (splitmix64 finalizer). Used to derive
    // independent per-component and per-iteration streams from one run seed.
    static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
        std::uint64_t x = a + 0x9e3779b97f4a7c15ull * (b + 0x632be59bd9b4e019ull);
        x ^= x >> 30;
        x *= 0xbf58476d1ce4e5b9ull;
        x ^= x >> 27;
        x *= 0x94d049bb133111ebull;
        x ^= x >> 31;
        return x;
    }

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace hsi
