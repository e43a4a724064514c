#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace sgrf {

// SplitMix64 finalizer. Used both as the generator step and for deriving
// substream seeds, so every component that needs randomness can own an
// independent stream keyed by (seed, index...) and stay reproducible for
// any thread count.
inline std::uint64_t hash64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    return hash64(hash64(a) ^ (b + 0x9e3779b97f4a7c15ULL));
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return mix_seed(mix_seed(a, b), c);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in {0, ..., n-1}. Multiply-shift keeps it branch-free and
    // exactly reproducible; the bias at 64 bits is irrelevant here.
    std::size_t uniform_index(std::size_t n) {
        return static_cast<std::size_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    bool bernoulli(double p) { return uniform01() < p; }

    // Box-Muller, cosine branch only.
    double normal() {
        double u1 = 1.0 - uniform01();  // (0, 1]
        double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    // In-place Fisher-Yates.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = uniform_index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
};

// Stable 64-bit digest of a bit mask; lets identical feature masks map to
// identical downstream seeds.
inline std::uint64_t hash_bits(std::uint64_t seed, const std::vector<std::uint8_t>& bits) {
    std::uint64_t h = hash64(seed ^ bits.size());
    std::uint64_t word = 0;
    int filled = 0;
    for (std::uint8_t b : bits) {
        word = (word << 1) | (b ? 1u : 0u);
        if (++filled == 64) {
            h = mix_seed(h, word);
            word = 0;
            filled = 0;
        }
    }
    if (filled > 0) h = mix_seed(h, word);
    return h;
}

}  // namespace sgrf
