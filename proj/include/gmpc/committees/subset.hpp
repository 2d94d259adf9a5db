#pragma once

// Mapping random strings to committees. A committee over n users is
// represented by a string of 2 * kappa * ceil(log2 n) bits; the string is
// read as kappa indices of 2*ceil(log2 n) bits each (reduced mod n, so the
// per-index bias is below 1/n), and any duplicates are re-drawn from an
// expander seeded with the same string, so both sides of a coin toss
// derive the same subset.

#include <algorithm>
#include <vector>

#include "gmpc/common.hpp"
#include "gmpc/rng.hpp"

namespace gmpc {

inline std::size_t subset_string_bits(std::uint32_t kappa, std::uint32_t n) {
    return std::size_t(kappa) * 2 * std::max<std::size_t>(1, ceil_log2(n));
}

inline std::size_t subset_string_bytes(std::uint32_t kappa, std::uint32_t n) {
    return (subset_string_bits(kappa, n) + 7) / 8;
}

inline Bytes xor_strings(const Bytes& a, const Bytes& b) { return xor_bytes(a, b); }

// Decode a committee string into a sorted set of kappa distinct user ids
// in 1..n.
inline std::vector<std::uint32_t> subset_from_bytes(const Bytes& material, std::uint32_t kappa,
                                                    std::uint32_t n) {
    require(kappa <= n, "subset_from_bytes: kappa > n");
    std::size_t bits_per = 2 * std::max<std::size_t>(1, ceil_log2(n));
    auto bit_at = [&](std::size_t idx) -> int {
        std::size_t byte = idx / 8;
        return byte < material.size() ? (material[byte] >> (idx % 8)) & 1 : 0;
    };
    std::vector<std::uint32_t> out;
    out.reserve(kappa);
    auto push_if_new = [&](std::uint32_t id) {
        if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
    };
    for (std::uint32_t j = 0; j < kappa; ++j) {
        std::uint64_t v = 0;
        for (std::size_t b = 0; b < bits_per; ++b)
            v |= std::uint64_t(bit_at(std::size_t(j) * bits_per + b)) << b;
        push_if_new(std::uint32_t(v % n) + 1);
    }
    if (out.size() < kappa) {
        Rng expander(tagged_hash("subset-expand", material));
        while (out.size() < kappa) push_if_new(std::uint32_t(expander.below(n)) + 1);
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Fresh uniform kappa-subset of 1..n, sorted.
inline std::vector<std::uint32_t> subset_sample(Rng& rng, std::uint32_t kappa, std::uint32_t n) {
    auto ids = rng.sample_distinct(kappa, n);
    for (auto& v : ids) ++v;
    std::sort(ids.begin(), ids.end());
    return ids;
}

// Uniform kappa-subset of 1..n excluding `self`, sorted. Protocol peers are
// sampled this way: a party gains nothing from picking itself.
inline std::vector<std::uint32_t> sample_peers(Rng& rng, std::uint32_t kappa, std::uint32_t n,
                                               std::uint32_t self) {
    require(kappa + 1 <= n, "sample_peers: kappa too large");
    require(self >= 1 && self <= n, "sample_peers: self out of range");
    auto ids = rng.sample_distinct(kappa, n - 1);
    for (auto& v : ids) {
        ++v;
        if (v >= self) ++v;
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

} // namespace gmpc
