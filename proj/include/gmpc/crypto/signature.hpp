#pragma once

// Hash-based signatures: one-time Lamport keys under a Merkle certification
// tree. A keypair is created with an explicit signature capacity; each
// signature consumes one leaf. Callers that sign from many places without
// shared state (committee trees) pass an explicit leaf index — each protocol
// role owns a distinct index, preserving the one-time property.
//
// Reference-scale parameters: messages are hashed and truncated to 64 bits
// before signing (64 secret pairs per leaf). The scheme is real — verify
// recomputes the leaf public key from revealed preimages and walks the tree
// to the root — but the truncation is sized for simulation throughput, not
// production security margins.

#include <optional>
#include <vector>

#include "gmpc/rng.hpp"
#include "gmpc/serialize.hpp"
#include "gmpc/sha256.hpp"

namespace gmpc {

struct SigPublicKey {
    Digest root{};
    std::uint32_t capacity = 0; // number of one-time leaves
    Bytes serialize() const {
        Writer w;
        w.raw(Bytes(root.begin(), root.end()));
        w.u32(capacity);
        return w.take();
    }
    static SigPublicKey deserialize(const Bytes& b) {
        Reader r(b);
        SigPublicKey pk;
        Bytes d = r.fixed(32);
        std::copy(d.begin(), d.end(), pk.root.begin());
        pk.capacity = r.u32();
        return pk;
    }
};

struct SigSecretKey {
    Digest seed{};
    std::uint32_t capacity = 0;
    std::uint32_t next_leaf = 0;        // used by the stateful sign()
    std::vector<Digest> nodes;          // cached tree, heap layout
    Bytes serialize() const {
        Writer w;
        w.raw(Bytes(seed.begin(), seed.end()));
        w.u32(capacity);
        w.u32(next_leaf);
        return w.take();
    }
};

struct Signature {
    std::uint32_t leaf = 0;
    std::vector<Bytes> revealed;   // preimage for each message bit
    std::vector<Digest> complement; // hashed secret for the complementary bit
    std::vector<Digest> copath;
};

struct SigKeypair {
    SigPublicKey pk;
    SigSecretKey sk;
};

namespace detail {

constexpr std::uint32_t kSigBits = 64;

// Allocation-free inner hashing: key generation touches every (leaf, bit,
// value) secret once, so these run millions of times per committee-tree run.
inline void hash_prefixed(Sha256& h, std::string_view tag) {
    std::uint8_t tl = std::uint8_t(tag.size());
    h.update(&tl, 1);
    h.update(reinterpret_cast<const std::uint8_t*>(tag.data()), tag.size());
}

inline Digest sig_secret_digest(const Digest& seed, std::uint32_t leaf,
                                std::uint32_t bit_index, std::uint32_t bit_value) {
    Sha256 h;
    hash_prefixed(h, "sig-secret");
    std::uint8_t buf[41];
    std::memcpy(buf, seed.data(), 32);
    for (int i = 0; i < 4; ++i) buf[32 + i] = std::uint8_t(leaf >> (8 * i));
    for (int i = 0; i < 4; ++i) buf[36 + i] = std::uint8_t(bit_index >> (8 * i));
    buf[40] = std::uint8_t(bit_value);
    h.update(buf, sizeof buf);
    return h.finish();
}

inline Bytes sig_secret(const Digest& seed, std::uint32_t leaf, std::uint32_t bit_index,
                        std::uint32_t bit_value) {
    return digest_bytes(sig_secret_digest(seed, leaf, bit_index, bit_value));
}

inline Digest sig_chain(const Digest& secret) {
    Sha256 h;
    hash_prefixed(h, "sig-chain");
    h.update(secret.data(), secret.size());
    return h.finish();
}

inline Digest sig_leaf_pub(const Digest& seed, std::uint32_t leaf) {
    Sha256 h;
    hash_prefixed(h, "sig-leaf");
    for (std::uint32_t i = 0; i < kSigBits; ++i)
        for (std::uint32_t b = 0; b < 2; ++b) {
            Digest el = sig_chain(sig_secret_digest(seed, leaf, i, b));
            h.update(el.data(), el.size());
        }
    return h.finish();
}

inline Digest sig_node(const Digest& l, const Digest& r) {
    Sha256 h;
    hash_prefixed(h, "sig-node");
    h.update(l.data(), l.size());
    h.update(r.data(), r.size());
    return h.finish();
}

inline std::uint64_t sig_msg_digest(const Bytes& msg) {
    Digest d = tagged_hash("sig-msg", msg);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(d[i]) << (8 * i);
    return v;
}

} // namespace detail

// capacity: number of signatures this key supports (rounded up to 2^h).
inline SigKeypair sig_gen(Rng& rng, std::uint32_t capacity) {
    require(capacity > 0, "sig_gen: capacity must be positive");
    SigKeypair kp;
    Bytes seed = rng.bytes(32);
    std::copy(seed.begin(), seed.end(), kp.sk.seed.begin());
    std::uint32_t leaves = std::uint32_t(next_pow2(capacity));
    kp.sk.capacity = leaves;
    kp.sk.nodes.assign(2 * leaves, Digest{});
    for (std::uint32_t i = 0; i < leaves; ++i)
        kp.sk.nodes[leaves + i] = detail::sig_leaf_pub(kp.sk.seed, i);
    for (std::uint32_t i = leaves - 1; i >= 1; --i)
        kp.sk.nodes[i] = detail::sig_node(kp.sk.nodes[2 * i], kp.sk.nodes[2 * i + 1]);
    kp.pk.root = kp.sk.nodes[1];
    kp.pk.capacity = leaves;
    return kp;
}

inline Signature sig_sign_leaf(const SigSecretKey& sk, const Bytes& msg, std::uint32_t leaf) {
    require(leaf < sk.capacity, "sig_sign_leaf: leaf exhausted");
    require(sk.nodes.size() == 2 * std::size_t(sk.capacity), "sig_sign_leaf: detached key");
    Signature sig;
    sig.leaf = leaf;
    std::uint64_t md = detail::sig_msg_digest(msg);
    sig.revealed.reserve(detail::kSigBits);
    sig.complement.reserve(detail::kSigBits);
    for (std::uint32_t i = 0; i < detail::kSigBits; ++i) {
        std::uint32_t bit = std::uint32_t((md >> i) & 1);
        sig.revealed.push_back(detail::sig_secret(sk.seed, leaf, i, bit));
        sig.complement.push_back(
            detail::sig_chain(detail::sig_secret_digest(sk.seed, leaf, i, 1 - bit)));
    }
    std::uint32_t node = sk.capacity + leaf;
    while (node > 1) {
        sig.copath.push_back(sk.nodes[node ^ 1]);
        node >>= 1;
    }
    return sig;
}

inline Signature sig_sign(SigSecretKey& sk, const Bytes& msg) {
    return sig_sign_leaf(sk, msg, sk.next_leaf++);
}

inline bool sig_verify(const SigPublicKey& pk, const Bytes& msg, const Signature& sig) {
    if (sig.leaf >= pk.capacity) return false;
    if (sig.revealed.size() != detail::kSigBits || sig.complement.size() != detail::kSigBits)
        return false;
    if (sig.copath.size() != ceil_log2(pk.capacity)) return false;
    std::uint64_t md = detail::sig_msg_digest(msg);
    Sha256 h;
    detail::hash_prefixed(h, "sig-leaf");
    for (std::uint32_t i = 0; i < detail::kSigBits; ++i) {
        if (sig.revealed[i].size() != 32) return false;
        Digest secret;
        std::copy(sig.revealed[i].begin(), sig.revealed[i].end(), secret.begin());
        Digest revealed_el = detail::sig_chain(secret);
        const Digest& el0 = ((md >> i) & 1) ? sig.complement[i] : revealed_el;
        const Digest& el1 = ((md >> i) & 1) ? revealed_el : sig.complement[i];
        h.update(el0.data(), el0.size());
        h.update(el1.data(), el1.size());
    }
    Digest node_digest = h.finish();
    std::uint32_t node = pk.capacity + sig.leaf;
    for (const Digest& sib : sig.copath) {
        node_digest = (node & 1) ? detail::sig_node(sib, node_digest)
                                 : detail::sig_node(node_digest, sib);
        node >>= 1;
    }
    return node_digest == pk.root;
}

// Wire codecs.
inline void write_signature(Writer& w, const Signature& sig) {
    w.u32(sig.leaf);
    w.u32(std::uint32_t(sig.revealed.size()));
    for (const Bytes& b : sig.revealed) w.blob(b);
    for (const Digest& d : sig.complement) w.raw(digest_bytes(d));
    w.u32(std::uint32_t(sig.copath.size()));
    for (const Digest& d : sig.copath) w.raw(digest_bytes(d));
}

inline Signature read_signature(Reader& r) {
    Signature sig;
    sig.leaf = r.u32();
    std::uint32_t nbits = r.u32();
    sig.revealed.resize(nbits);
    for (auto& b : sig.revealed) b = r.blob();
    sig.complement.resize(nbits);
    for (auto& d : sig.complement) {
        Bytes b = r.fixed(32);
        std::copy(b.begin(), b.end(), d.begin());
    }
    std::uint32_t np = r.u32();
    sig.copath.resize(np);
    for (auto& d : sig.copath) {
        Bytes b = r.fixed(32);
        std::copy(b.begin(), b.end(), d.begin());
    }
    return sig;
}

} // namespace gmpc
