#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace rbmkit {

using Bit = std::uint8_t;

// One layer's bits (visible or hidden), values restricted to {0,1}.
using BinaryVector = std::vector<Bit>;

// A full (v,h) configuration of an RBM.
struct JointState {
    BinaryVector v;
    BinaryVector h;

    bool operator==(const JointState& o) const { return v == o.v && h == o.h; }
};

inline std::size_t hash_bits(const BinaryVector& bits, std::size_t seed = 0xcbf29ce484222325ULL) {
    std::size_t h = seed;
    for (Bit b : bits) {
        h ^= b + 1;
        h *= 0x100000001b3ULL;
    }
    return h;
}

struct JointStateHash {
    std::size_t operator()(const JointState& s) const {
        return hash_bits(s.h, hash_bits(s.v));
    }
};

struct BinaryVectorHash {
    std::size_t operator()(const BinaryVector& v) const { return hash_bits(v); }
};

// Unpacks the low `n_bits` of an integer index into a BinaryVector, bit 0 first.
inline BinaryVector bits_from_index(std::uint64_t index, int n_bits) {
    BinaryVector out(static_cast<std::size_t>(n_bits));
    for (int i = 0; i < n_bits; ++i) out[static_cast<std::size_t>(i)] = (index >> i) & 1u;
    return out;
}

} // namespace rbmkit
