#pragma once

// Adversary model. A corrupted server sees every (src, dst, length) triple
// of a round before delivery and picks envelopes to suppress; it also
// controls the payload content of server-originated protocol steps, which
// protocol runners expose as override hooks below. Corrupted users can go
// silent or substitute payloads. Every hook defaults to honest behaviour,
// so a strategy overrides exactly the steps it attacks.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gmpc/common.hpp"
#include "gmpc/net/envelope.hpp"

namespace gmpc {

struct MetaRecord {
    std::size_t intent_index = 0;
    PartyId src;
    PartyId dst;
    std::uint64_t length = 0;
};

class Strategy {
public:
    virtual ~Strategy() = default;

    virtual std::string name() const { return "passive"; }

    // ---- network layer (corrupted server only) ----
    // Indices into `meta` of intents to suppress this round.
    virtual std::vector<std::size_t> select_blocks(std::uint32_t round,
                                                   const std::vector<MetaRecord>& meta) {
        (void)round;
        (void)meta;
        return {};
    }

    // ---- corrupted users ----
    // A silent corrupted user skips the given protocol phase entirely.
    virtual bool user_silent(std::uint32_t user, std::string_view phase) {
        (void)user;
        (void)phase;
        return false;
    }

    // A corrupted user substitutes the payload it would honestly send in
    // the given phase; nullopt sends the honest bytes.
    virtual std::optional<Bytes> user_payload(std::uint32_t user, std::string_view phase,
                                              const Bytes& honest) {
        (void)user;
        (void)phase;
        (void)honest;
        return std::nullopt;
    }

    // ---- corrupted server, protocol-step payload overrides ----
    // Per-user view of the committee table the server commits to. `entry`
    // is the honest serialized table row `position` as committed for
    // `viewer`; return a substitute to equivocate.
    virtual std::optional<Bytes> pc_table_entry(std::uint32_t viewer, std::uint32_t position,
                                                const Bytes& entry) {
        (void)viewer;
        (void)position;
        (void)entry;
        return std::nullopt;
    }

    // Neighbor-row decommitment bundle the server sends a committee's
    // members during graph setup; substituting it fails their checks.
    virtual std::optional<Bytes> graph_openings(std::uint32_t pc_owner, const Bytes& honest) {
        (void)pc_owner;
        (void)honest;
        return std::nullopt;
    }

    // Alive-count the server announces to a given committee.
    virtual std::optional<std::uint32_t> alive_count(std::uint32_t committee_owner,
                                                     std::uint32_t honest_count) {
        (void)committee_owner;
        (void)honest_count;
        return std::nullopt;
    }

    // Election result announced to a given committee: (bin, member list).
    virtual std::optional<std::pair<std::uint32_t, std::vector<std::uint32_t>>>
    election_result(std::uint32_t committee_owner, std::uint32_t honest_bin,
                    const std::vector<std::uint32_t>& honest_committee) {
        (void)committee_owner;
        (void)honest_bin;
        (void)honest_committee;
        return std::nullopt;
    }

    // Key material the server relays to a committee owner's members.
    virtual std::optional<Bytes> relayed_key(std::uint32_t target, const Bytes& honest_pk) {
        (void)target;
        (void)honest_pk;
        return std::nullopt;
    }

    // Prover-side proof attacks: substitute the codeword slice sent to a
    // given holder, or the evaluated ciphertext for output index i.
    virtual std::optional<Bytes> prover_slice(std::uint32_t holder, const Bytes& honest_slice) {
        (void)holder;
        (void)honest_slice;
        return std::nullopt;
    }
    virtual std::optional<Bytes> prover_eval(std::uint32_t index, const Bytes& honest_ct) {
        (void)index;
        (void)honest_ct;
        return std::nullopt;
    }

    // Circuit-wiring lists the server delivers (rewiring attacks).
    virtual std::optional<std::vector<std::uint32_t>> wiring(std::uint32_t committee,
                                                             const std::vector<std::uint32_t>& honest) {
        (void)committee;
        (void)honest;
        return std::nullopt;
    }

    // Output both a corrupted server and corrupted committee owner dictate
    // through the next-message oracle.
    virtual std::optional<Bytes> dictate_committee_output(std::uint32_t committee,
                                                          const Bytes& honest) {
        (void)committee;
        (void)honest;
        return std::nullopt;
    }
};

struct AdversarySpec {
    bool server_corrupted = false;
    std::set<std::uint32_t> corrupted_users; // user indices in 1..n
    Strategy* strategy = nullptr;            // nullptr == fully passive

    bool is_corrupted(PartyId p) const {
        if (p.is_server()) return server_corrupted;
        return corrupted_users.count(p.v) != 0;
    }

    Strategy& strat() const {
        static Strategy passive;
        return strategy ? *strategy : passive;
    }
};

} // namespace gmpc
