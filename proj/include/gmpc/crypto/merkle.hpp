#pragma once

// Vector commitment: Merkle tree over salted leaves. Committing binds every
// position; openings reveal (index, value, salt, copath) and verify against
// the root. Salts keep unopened positions hidden from opening recipients.

#include <map>
#include <optional>
#include <vector>

#include "gmpc/rng.hpp"
#include "gmpc/serialize.hpp"
#include "gmpc/sha256.hpp"

namespace gmpc {

struct VcParams {
    std::uint32_t size = 0;     // number of committed positions
    std::uint32_t leaves = 0;   // padded to a power of two
};

inline VcParams vc_setup(std::uint32_t size) {
    require(size > 0, "vc_setup: empty vector");
    return {size, std::uint32_t(next_pow2(size))};
}

// Prover-side state: full node array plus per-position salts.
struct VcAux {
    VcParams pp;
    std::vector<Bytes> values;
    std::vector<Bytes> salts;
    std::vector<Digest> nodes; // 1-based heap layout, nodes[1] = root
};

struct VcOpening {
    std::uint32_t index = 0;
    Bytes value;
    Bytes salt;
    std::vector<Digest> copath; // sibling digests, leaf level first
};

using VcCommitment = Digest;

namespace detail {
inline Digest vc_leaf_digest(std::uint32_t index, const Bytes& salt, const Bytes& value) {
    Writer w;
    w.u32(index);
    w.blob(salt);
    w.blob(value);
    return tagged_hash("vc-leaf", w.take());
}
inline Digest vc_pad_digest(std::uint32_t index) {
    Writer w;
    w.u32(index);
    return tagged_hash("vc-pad", w.take());
}
inline Digest vc_node_digest(const Digest& l, const Digest& r) {
    return tagged_hash("vc-node", Bytes(l.begin(), l.end()), Bytes(r.begin(), r.end()));
}
} // namespace detail

inline std::pair<VcAux, VcCommitment> vc_commit(const VcParams& pp,
                                                const std::vector<Bytes>& values, Rng& rng) {
    require(values.size() == pp.size, "vc_commit: size mismatch");
    VcAux aux;
    aux.pp = pp;
    aux.values = values;
    aux.salts.reserve(pp.size);
    for (std::uint32_t i = 0; i < pp.size; ++i) aux.salts.push_back(rng.bytes(16));
    std::uint32_t L = pp.leaves;
    aux.nodes.assign(2 * L, Digest{});
    for (std::uint32_t i = 0; i < L; ++i)
        aux.nodes[L + i] = i < pp.size ? detail::vc_leaf_digest(i, aux.salts[i], values[i])
                                       : detail::vc_pad_digest(i);
    for (std::uint32_t i = L - 1; i >= 1; --i)
        aux.nodes[i] = detail::vc_node_digest(aux.nodes[2 * i], aux.nodes[2 * i + 1]);
    VcCommitment root = aux.nodes[1];
    return {std::move(aux), root};
}

inline VcOpening vc_open_one(const VcAux& aux, std::uint32_t index) {
    require(index < aux.pp.size, "vc_open_one: index out of range");
    VcOpening o;
    o.index = index;
    o.value = aux.values[index];
    o.salt = aux.salts[index];
    std::uint32_t node = aux.pp.leaves + index;
    while (node > 1) {
        o.copath.push_back(aux.nodes[node ^ 1]);
        node >>= 1;
    }
    return o;
}

inline std::vector<VcOpening> vc_open(const VcAux& aux, const std::vector<std::uint32_t>& s) {
    std::vector<VcOpening> out;
    out.reserve(s.size());
    for (auto i : s) out.push_back(vc_open_one(aux, i));
    return out;
}

inline bool vc_verify_one(const VcParams& pp, const VcCommitment& c, const VcOpening& o) {
    if (o.index >= pp.size) return false;
    if (o.copath.size() != ceil_log2(pp.leaves)) return false;
    Digest h = detail::vc_leaf_digest(o.index, o.salt, o.value);
    std::uint32_t node = pp.leaves + o.index;
    for (const Digest& sib : o.copath) {
        h = (node & 1) ? detail::vc_node_digest(sib, h) : detail::vc_node_digest(h, sib);
        node >>= 1;
    }
    return h == c;
}

inline bool vc_verify(const VcParams& pp, const VcCommitment& c,
                      const std::vector<VcOpening>& openings) {
    for (const auto& o : openings)
        if (!vc_verify_one(pp, c, o)) return false;
    return true;
}

// Wire codecs for openings (they travel inside protocol payloads).
inline void write_opening(Writer& w, const VcOpening& o) {
    w.u32(o.index);
    w.blob(o.value);
    w.blob(o.salt);
    w.u32(std::uint32_t(o.copath.size()));
    for (const Digest& d : o.copath) w.raw(Bytes(d.begin(), d.end()));
}

inline VcOpening read_opening(Reader& r) {
    VcOpening o;
    o.index = r.u32();
    o.value = r.blob();
    o.salt = r.blob();
    std::uint32_t n = r.u32();
    require(n <= r.remaining() / 32, "read_opening: bad copath length");
    o.copath.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        Bytes b = r.fixed(32);
        std::copy(b.begin(), b.end(), o.copath[i].begin());
    }
    return o;
}

} // namespace gmpc
