#pragma once

#include <cstdint>
#include <random>

namespace tldc {

// splitmix64; used to derive independent stream seeds from (seed, index...)
// tuples so every randomized stage is a pure function of its coordinates.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a) {
    return splitmix64(base ^ splitmix64(a));
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
    return derive_seed(derive_seed(base, a), b);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b,
                                 std::uint64_t c) {
    return derive_seed(derive_seed(base, a, b), c);
}

// Uniform double in [0, 1). Hand-rolled from the top 53 bits so draws are
// identical across standard libraries (std::uniform_real_distribution is not).
inline double uniform_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_range(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform_unit(rng);
}

// Bounded draw for shuffles; the slight modulo bias is irrelevant here,
// determinism is what matters.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
    return rng() % n;
}

template <typename Vec>
void shuffle_in_place(Vec& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(uniform_below(rng, i));
        std::swap(v[i - 1], v[j]);
    }
}

template <typename Vec>
void shuffle_in_place(Vec& v, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    shuffle_in_place(v, rng);
}

}  // namespace tldc
