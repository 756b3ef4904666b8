// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace tfasim {

// SplitMix64 finalizer. Used for seed mixing and derived-stream ids.
inline std::uint64_t mix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Derives an independent stream id from a master seed and a tag tuple,
// e.g. derive_stream(seed, kStreamSmallScale, ue, bs, slot). Distinct tuples
// give statistically independent mt19937_64 seeds.
inline std::uint64_t derive_stream(std::uint64_t master, std::initializer_list<std::uint64_t> tags)
{
    std::uint64_t h = mix64(master);
    for (std::uint64_t t : tags)
        h = mix64(h ^ t);
    return h;
}

// Stream tags for the simulator's RNG namespaces.
inline constexpr std::uint64_t kStreamDeployment = 0x01;
inline constexpr std::uint64_t kStreamLinkState = 0x02;
inline constexpr std::uint64_t kStreamShadow = 0x03;
inline constexpr std::uint64_t kStreamSmallScale = 0x04;
inline constexpr std::uint64_t kStreamGa = 0x05;
inline constexpr std::uint64_t kStreamLbFi = 0x06;

// Deterministic RNG with in-house samplers. All distributions are built from
// the raw 64-bit stream so that a fixed seed reproduces the exact same value
// sequence regardless of standard-library version.
class Rng
{
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer on [0, n).
    int uniform_int(int n) { return static_cast<int>(uniform() * static_cast<double>(n)); }

    bool bernoulli(double p) { return uniform() < p; }

    // Standard normal via Box-Muller (two uniforms per call, no caching, so the
    // stream position after each call is well defined).
    double normal()
    {
        double u1 = uniform();
        double u2 = uniform();
        // u1 in [0,1): flip to (0,1] so the log argument is never zero
        return std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * M_PI * u2);
    }

    // Standard exponential (unit mean).
    double exponential() { return -std::log(1.0 - uniform()); }

    // Zero-mean Laplace with standard deviation `stddev` (scale = stddev/sqrt(2)).
    double laplace(double stddev)
    {
        double b = stddev / std::sqrt(2.0);
        double u = uniform() - 0.5;
        return (u < 0.0) ? b * std::log(1.0 + 2.0 * u) : -b * std::log(1.0 - 2.0 * u);
    }

  private:
    std::mt19937_64 gen_;
};

// FNV-1a over raw bytes; used for channel checksums in result metadata.
inline std::uint64_t fnv1a64(const void* data, std::size_t len, std::uint64_t h = 0xcbf29ce484222325ULL)
{
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i)
    {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace tfasim
