#pragma once

#include <cstdint>
#include <random>

namespace rbmkit {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Counter-based substream derivation: stream i of a master seed is the same
// no matter how many streams exist or in which order they are instantiated.
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(splitmix64(master) ^ splitmix64(stream + 0x51a7b12ce5ad9c3dULL));
}

inline Rng substream(std::uint64_t master, std::uint64_t stream) {
    return Rng(substream_seed(master, stream));
}

inline bool bernoulli(Rng& rng, double p) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

} // namespace rbmkit
