#pragma once

// Star-topology key board: a register-once directory of per-user signing
// and encryption keys. The board is a functionality of its own — it is not
// the server, so the server can neither read nor block board traffic.
// With the board in place, any user pair can exchange authenticated
// encrypted payloads through the server: sign-then-encrypt, with a failed
// signature treated exactly like a blocked message.

#include <map>
#include <optional>

#include "gmpc/crypto/fhe.hpp"
#include "gmpc/crypto/signature.hpp"
#include "gmpc/net/party.hpp"
#include "gmpc/serialize.hpp"

namespace gmpc {

struct BoardRecord {
    PartyId user;
    Bytes pk_sig;
    Bytes pk_enc;
};

class Board {
public:
    // First registration wins; repeats are ignored per the register-once
    // contract (returns whether the call took effect).
    bool register_keys(PartyId user, Bytes pk_sig, Bytes pk_enc) {
        if (records_.count(user)) return false;
        records_[user] = BoardRecord{user, std::move(pk_sig), std::move(pk_enc)};
        return true;
    }

    // Lookup; unregistered targets yield nothing (the request is ignored).
    std::optional<BoardRecord> get(PartyId user) const {
        auto it = records_.find(user);
        if (it == records_.end()) return std::nullopt;
        return it->second;
    }

    std::size_t size() const { return records_.size(); }

private:
    std::map<PartyId, BoardRecord> records_;
};

// Sign-then-encrypt a payload from src to dst using board-registered keys.
inline std::optional<Bytes> secure_seal(const Board& board, PartyId src, PartyId dst,
                                        const Bytes& payload, SigSecretKey& src_sign_key,
                                        Rng& rng) {
    auto rec = board.get(dst);
    if (!rec) return std::nullopt;
    Writer signed_part;
    signed_part.u32(src.v);
    signed_part.u32(dst.v);
    signed_part.blob(payload);
    Bytes body = signed_part.take();
    Signature sig = sig_sign(src_sign_key, body);
    Writer w;
    w.blob(body);
    write_signature(w, sig);
    return fhe_enc(rec->pk_enc, w.take(), rng);
}

// Decrypt and authenticate. Any failure (wrong key, bad signature, claimed
// sender mismatch) yields nothing — the caller treats it as a message that
// never arrived.
inline std::optional<Bytes> secure_open(const Board& board, PartyId expected_src, PartyId dst,
                                        const Bytes& sealed, const Bytes& dst_enc_sk) {
    auto plain = fhe_dec(dst_enc_sk, sealed);
    if (!plain) return std::nullopt;
    auto rec = board.get(expected_src);
    if (!rec) return std::nullopt;
    try {
        Reader r(*plain);
        Bytes body = r.blob();
        Signature sig = read_signature(r);
        SigPublicKey pk = SigPublicKey::deserialize(rec->pk_sig);
        if (!sig_verify(pk, body, sig)) return std::nullopt;
        Reader br(body);
        if (PartyId(br.u32()) != expected_src) return std::nullopt;
        if (PartyId(br.u32()) != dst) return std::nullopt;
        return br.blob();
    } catch (const std::out_of_range&) {
        return std::nullopt;
    }
}

} // namespace gmpc
