#pragma once

// Reference homomorphic-encryption stand-in with exact functional semantics:
//   dec(sk, eval(pk, C, enc(pk, m_1..m_k), rho)) == C(m_1..m_k)
// Ciphertexts carry their plaintext in the clear next to a key-bound tag and
// a deterministic evaluation trace; nothing here is hard to invert, and no
// simulator component ever relies on ciphertext secrecy — confidentiality is
// part of the model, while this scheme supplies the *functional* contract:
// key binding (decrypting under the wrong key yields nothing), randomized
// encryption, and evaluation that is a pure function of
// (pk, circuit, input ciphertexts, rho) so independent parties can reproduce
// and cross-check an evaluation byte for byte.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gmpc/rng.hpp"
#include "gmpc/serialize.hpp"
#include "gmpc/sha256.hpp"

namespace gmpc {

struct FheKeypair {
    Bytes pk;
    Bytes sk;
};

struct FheCircuit {
    std::string id; // distinct per circuit; bound into evaluated ciphertexts
    std::function<Bytes(const std::vector<Bytes>&)> eval;
};

namespace detail {
inline Digest fhe_key_tag(const Bytes& pk) { return tagged_hash("fhe-tag", pk); }
} // namespace detail

inline FheKeypair fhe_gen(Rng& rng) {
    FheKeypair kp;
    kp.sk = rng.bytes(32);
    kp.pk = digest_bytes(tagged_hash("fhe-pk", kp.sk));
    return kp;
}

inline Bytes fhe_enc(const Bytes& pk, const Bytes& m, Rng& rng) {
    Digest tag = detail::fhe_key_tag(pk);
    Bytes nonce = rng.bytes(16);
    Writer trace_in;
    trace_in.raw(digest_bytes(tag));
    trace_in.blob(m);
    trace_in.blob(nonce);
    Digest trace = tagged_hash("fhe-enc", trace_in.take());
    Writer w;
    w.raw(digest_bytes(tag));
    w.u8(0); // fresh encryption
    w.blob(m);
    w.raw(digest_bytes(trace));
    return w.take();
}

struct FheParsed {
    Digest tag{};
    std::uint8_t kind = 0;
    Bytes plaintext;
    Digest trace{};
};

inline std::optional<FheParsed> fhe_parse(const Bytes& ct) {
    if (ct.size() < 32 + 1 + 4 + 32) return std::nullopt;
    Reader r(ct);
    FheParsed p;
    Bytes t = r.fixed(32);
    std::copy(t.begin(), t.end(), p.tag.begin());
    p.kind = r.u8();
    p.plaintext = r.blob();
    if (r.remaining() != 32) return std::nullopt;
    Bytes tr = r.fixed(32);
    std::copy(tr.begin(), tr.end(), p.trace.begin());
    return p;
}

// Evaluation: all inputs must be bound to pk; output is deterministic in
// (pk, circuit id, input ciphertexts, rho).
inline std::optional<Bytes> fhe_eval(const Bytes& pk, const FheCircuit& circuit,
                                     const std::vector<Bytes>& cts, const Bytes& rho) {
    Digest tag = detail::fhe_key_tag(pk);
    std::vector<Bytes> plain;
    plain.reserve(cts.size());
    Writer trace_in;
    trace_in.raw(digest_bytes(tag));
    trace_in.str(circuit.id);
    for (const Bytes& ct : cts) {
        auto p = fhe_parse(ct);
        if (!p || p->tag != tag) return std::nullopt;
        plain.push_back(std::move(p->plaintext));
        trace_in.raw(digest_bytes(p->trace));
    }
    trace_in.blob(rho);
    Digest trace = tagged_hash("fhe-eval", trace_in.take());
    Bytes m_out = circuit.eval(plain);
    Writer w;
    w.raw(digest_bytes(tag));
    w.u8(1); // evaluated
    w.blob(m_out);
    w.raw(digest_bytes(trace));
    return w.take();
}

inline std::optional<Bytes> fhe_dec(const Bytes& sk, const Bytes& ct) {
    Bytes pk = digest_bytes(tagged_hash("fhe-pk", sk));
    auto p = fhe_parse(ct);
    if (!p || p->tag != detail::fhe_key_tag(pk)) return std::nullopt;
    return p->plaintext;
}

} // namespace gmpc
