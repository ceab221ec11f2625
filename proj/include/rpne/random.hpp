#pragma once

#include <cstdint>
#include <random>

namespace rpne {

using Rng = std::mt19937_64;

// splitmix64 finaliser; used for counter-based streams and seed derivation.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    return mix64(seed ^ mix64(stream + 0x632BE59BD9B4E019ull));
}

// Uniform [0, 1) from a (key, counter) pair without shared state.
constexpr double counter_uniform(std::uint64_t key, std::uint64_t counter) noexcept {
    return static_cast<double>(mix64(key ^ mix64(counter)) >> 11) * 0x1.0p-53;
}

template <class T>
T uniform_index(Rng& rng, T n) {
    return std::uniform_int_distribution<T>(0, n - 1)(rng);
}

inline double uniform_real(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline bool bernoulli(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

} // namespace rpne
