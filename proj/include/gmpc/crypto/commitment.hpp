#pragma once

// Hiding commitment to a byte string: c = H(salt || msg) with a 256-bit
// salt. Used for the user side of the committee coin toss.

#include "gmpc/rng.hpp"
#include "gmpc/sha256.hpp"

namespace gmpc {

struct CommitOpening {
    Bytes message;
    Bytes salt;
};

inline std::pair<Digest, CommitOpening> commit(const Bytes& message, Rng& rng) {
    CommitOpening open{message, rng.bytes(32)};
    Digest c = tagged_hash("hide-commit", open.salt, message);
    return {c, std::move(open)};
}

inline bool commit_verify(const Digest& c, const CommitOpening& open) {
    return tagged_hash("hide-commit", open.salt, open.message) == c;
}

} // namespace gmpc
