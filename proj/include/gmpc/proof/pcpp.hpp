#pragma once

// Proof backends for the statement "every published evaluation is the
// honest function of the published inputs". The statement is a public part
// followed by one block per party, z_i = (r_i, x_ct_i, y_ct_i): the party's
// shared-randomness bit, its encrypted input, and the evaluation the prover
// published for it. Backends see the statement only through oracles — block
// i via the holders, proof position p via commitment openings — and both
// oracles are allowed to fail, which must read as rejection.
//
// The reference backend makes no attempt at succinctness: the "proof" is the
// statement itself under a binding commitment, and verification re-executes
// a random sample of blocks. Soundness against a block that disagrees with
// re-execution is exactly the chance of sampling it.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gmpc/common.hpp"
#include "gmpc/crypto/fhe.hpp"
#include "gmpc/crypto/prg.hpp"
#include "gmpc/rng.hpp"
#include "gmpc/serialize.hpp"

namespace gmpc {

struct StatementBlock {
    std::uint8_t r = 0; // the party's public randomness bit
    Bytes x_ct;         // encrypted input
    Bytes y_ct;         // evaluated output published for this party
};

inline Bytes statement_block_bytes(const StatementBlock& z) {
    Writer w;
    w.u8(z.r);
    w.blob(z.x_ct);
    w.blob(z.y_ct);
    return w.take();
}

// Strict inverse of statement_block_bytes: trailing bytes, truncation or a
// non-bit flag all fail.
inline std::optional<StatementBlock> parse_statement_block(const Bytes& b) {
    try {
        Reader r(b);
        StatementBlock z;
        z.r = r.u8();
        z.x_ct = r.blob();
        z.y_ct = r.blob();
        if (z.r > 1 || !r.done()) return std::nullopt;
        return z;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

// Canonical statement serialization: public part, then every block
// length-prefixed in index order. Commitments and hashes are over these
// exact bytes.
inline Bytes statement_bytes(const Bytes& pub, const std::vector<Bytes>& blocks) {
    Writer w;
    w.raw(pub);
    for (const Bytes& b : blocks) w.blob(b);
    return w.take();
}

// The language parameters every verifier knows: the evaluation key, the
// per-party circuits, and how much evaluation randomness each gets. The
// randomness for block i is derived from the packed r-bits of all parties,
// so it is fixed once the statement is.
struct FheLanguage {
    Bytes pk;
    std::vector<FheCircuit> circuits;
    std::size_t rho_bytes = 32;

    Bytes pub() const {
        Writer w;
        w.blob(pk);
        w.u32(std::uint32_t(circuits.size()));
        w.u32(std::uint32_t(rho_bytes));
        return w.take();
    }

    // Deterministic re-execution: block i holds iff y_ct_i is byte-for-byte
    // the evaluation of circuit i over all published inputs.
    bool block_holds(std::uint32_t i, const std::vector<StatementBlock>& zs) const {
        if (zs.size() != circuits.size() || i >= zs.size()) return false;
        std::vector<std::uint8_t> bits;
        std::vector<Bytes> cts;
        bits.reserve(zs.size());
        cts.reserve(zs.size());
        for (const auto& z : zs) {
            bits.push_back(z.r);
            cts.push_back(z.x_ct);
        }
        Bytes rho = prg_block(pack_bits(bits), i, rho_bytes);
        auto y = fhe_eval(pk, circuits[i], cts, rho);
        if (!y) return false;
        return *y == zs[i].y_ct;
    }
};

// Honest prover's statement for the given plaintext inputs.
inline std::vector<StatementBlock> honest_statement(const FheLanguage& lang,
                                                    const std::vector<Bytes>& inputs, Rng& rng) {
    require(inputs.size() == lang.circuits.size(), "honest_statement: arity mismatch");
    std::vector<StatementBlock> zs(inputs.size());
    std::vector<std::uint8_t> bits(inputs.size());
    std::vector<Bytes> cts(inputs.size());
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        zs[i].r = rng.bit() ? 1 : 0;
        zs[i].x_ct = fhe_enc(lang.pk, inputs[i], rng);
        bits[i] = zs[i].r;
        cts[i] = zs[i].x_ct;
    }
    Bytes seed = pack_bits(bits);
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        auto y = fhe_eval(lang.pk, lang.circuits[i], cts, prg_block(seed, i, lang.rho_bytes));
        require(y.has_value(), "honest_statement: evaluation failed");
        zs[i].y_ct = std::move(*y);
    }
    return zs;
}

class PcppBackend {
  public:
    // What the verifier can reach: `blocks` statement blocks via the holder
    // network, `proof_positions` committed positions via openings. Either
    // oracle may come back empty (holder unreachable, opening refused or
    // failing the commitment check); backends must reject in that case.
    struct Oracles {
        std::uint32_t blocks = 0;
        std::uint32_t proof_positions = 0;
        std::function<std::optional<Bytes>(std::uint32_t)> statement;
        std::function<std::optional<Bytes>(std::uint32_t)> proof;
    };

    virtual ~PcppBackend() = default;
    virtual std::string id() const = 0;

    // Prover side: the list of positions to put under the commitment.
    virtual std::vector<Bytes> prove(const Bytes& pub,
                                     const std::vector<Bytes>& statement_blocks) const = 0;

    // Verifier side: `queries` is the sampling budget; rng drives the
    // sampling and nothing else.
    virtual bool verify(const Bytes& pub, const Oracles& o, std::uint32_t queries,
                        Rng& rng) const = 0;
};

// Reference backend: commit to the statement verbatim, then spot-check. The
// verifier first fetches every committed position (the proof is short — one
// block per party), then samples `queries` block indices uniformly; each
// sampled block must match what the holders serve byte-for-byte and must
// re-execute correctly against the full committed input set. Re-executions
// are memoized, so repeated samples of the same block cost one evaluation.
class SpotcheckBackend final : public PcppBackend {
  public:
    explicit SpotcheckBackend(FheLanguage lang) : lang_(std::move(lang)) {}

    std::string id() const override { return "spotcheck-v1"; }

    std::vector<Bytes> prove(const Bytes&, const std::vector<Bytes>& statement_blocks) const override {
        return statement_blocks;
    }

    bool verify(const Bytes& pub, const Oracles& o, std::uint32_t queries,
                Rng& rng) const override {
        if (pub != lang_.pub()) return false;
        if (o.blocks != lang_.circuits.size()) return false;
        if (o.proof_positions != o.blocks) return false;
        if (!o.statement || !o.proof) return false;
        std::vector<Bytes> committed(o.blocks);
        std::vector<StatementBlock> zs(o.blocks);
        for (std::uint32_t i = 0; i < o.blocks; ++i) {
            auto b = o.proof(i);
            if (!b) return false;
            auto z = parse_statement_block(*b);
            if (!z) return false;
            committed[i] = std::move(*b);
            zs[i] = std::move(*z);
        }
        std::map<std::uint32_t, bool> checked;
        for (std::uint32_t q = 0; q < queries; ++q) {
            auto i = std::uint32_t(rng.below(o.blocks));
            auto held = o.statement(i);
            if (!held) return false;
            if (*held != committed[i]) return false;
            auto [it, fresh] = checked.try_emplace(i, false);
            if (fresh) it->second = lang_.block_holds(i, zs);
            if (!it->second) return false;
        }
        return true;
    }

  private:
    FheLanguage lang_;
};

} // namespace gmpc
