#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace noah {

// splitmix64 finalizer; used to mix seeds for derived streams.
inline uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Derive an independent sub-stream seed from a master seed and an index.
inline uint64_t derive_stream(uint64_t master, uint64_t index) {
    return mix64(master ^ mix64(index + 0x51ed270b7a259674ULL));
}

// Named sub-streams so pipeline stages can be re-run independently.
inline uint64_t derive_stream(uint64_t master, std::string_view name) {
    uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (char c : name) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return mix64(master ^ h);
}

// Seeded random source. All transforms (doubles, bounded ints, Bernoulli)
// are implemented on top of the raw 64-bit output so results are identical
// across platforms and standard-library implementations.
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    // uniform in [0, 1), 53-bit resolution
    double next_double() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return next_double() < p; }

    // unbiased uniform integer in [0, n)
    uint64_t uniform_below(uint64_t n) {
        const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[uniform_below(i)]);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace noah
