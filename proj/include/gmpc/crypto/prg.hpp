#pragma once

// Deterministic expansion of a short seed into per-party randomness blocks:
// block i of G(seed) feeds party i's evaluation randomness. SHA-256 in
// counter mode; pure function of (seed, block index, block length).

#include <vector>

#include "gmpc/sha256.hpp"
#include "gmpc/serialize.hpp"

namespace gmpc {

inline Bytes prg_block(const Bytes& seed, std::uint32_t block_index, std::size_t out_len) {
    Bytes out;
    out.reserve(out_len);
    std::uint32_t counter = 0;
    while (out.size() < out_len) {
        Writer w;
        w.blob(seed);
        w.u32(block_index);
        w.u32(counter++);
        Digest d = tagged_hash("prg", w.take());
        for (std::uint8_t b : d) {
            if (out.size() == out_len) break;
            out.push_back(b);
        }
    }
    return out;
}

// Full expansion: n_blocks blocks of block_len bytes each.
inline std::vector<Bytes> prg_expand(const Bytes& seed, std::uint32_t n_blocks,
                                     std::size_t block_len) {
    std::vector<Bytes> out;
    out.reserve(n_blocks);
    for (std::uint32_t i = 0; i < n_blocks; ++i) out.push_back(prg_block(seed, i, block_len));
    return out;
}

// Seeds assembled from one bit per party: bit i of the seed string is
// party i's contribution.
inline Bytes pack_bits(const std::vector<std::uint8_t>& bits) {
    Bytes out((bits.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i] & 1) out[i / 8] |= std::uint8_t(1u << (i % 8));
    return out;
}

} // namespace gmpc
