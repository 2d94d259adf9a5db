#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gmpc/common.hpp"
#include "gmpc/serialize.hpp"

namespace gmpc {

// Global slack parameter for this module's thresholds.
inline double epsilon_slack(double alpha) {
    require(alpha >= 0 && alpha < 1.0 / 6, "epsilon_slack: need 0 <= alpha < 1/6");
    return 1.0 / 6 - alpha;
}

struct PersonalCommittee {
    std::uint32_t owner = 0;
    std::vector<std::uint32_t> members; // sorted user ids; empty = none sampled
    bool active = false;
};

// Everything the setup phase establishes, in one checkable record: who
// survived, which committee fronts each user, the neighbor sets the PCs
// agreed on, and the measured diameter of the graph they induce.
struct PcsgWitness {
    std::uint32_t n = 0;
    std::uint32_t kappa = 0;
    double alpha = 0.0;
    std::uint32_t flood_iterations = 0; // alive-ping count used throughout

    std::vector<PersonalCommittee> pc;                 // index = owner (0 unused)
    std::vector<bool> user_aborted;                    // index = user
    std::vector<std::uint32_t> alive;                  // sorted; server's list of alive users
    std::vector<std::vector<std::uint32_t>> neighbors; // per alive owner: total neighbor set
    // Agreement bookkeeping: neighbor_holds[i] = every neighbor of i holds
    // (i, P_i); members_hold[i] = users in P_i hold (j, P_j) for all alive
    // neighbors j. Filled by the runners from actual delivered state.
    std::vector<bool> neighbor_holds;
    std::vector<bool> members_hold;
    std::optional<std::uint32_t> diameter; // undirected PC graph on the checked set

    bool is_alive(std::uint32_t user) const {
        return std::binary_search(alive.begin(), alive.end(), user);
    }
};

struct PcsgReport {
    bool holds = false;
    std::vector<std::string> violated;
};

struct ElectionResult {
    std::vector<std::uint32_t> committee; // sorted user ids
    std::uint32_t bin = 0;                // winning bin, 1-based
    std::uint32_t bins = 0;               // total bin count b
};

struct CommitteeTree {
    std::vector<std::vector<std::uint32_t>> committees; // index 0..n
    Bytes pk; // serialized signing key all users accepted

    static std::optional<std::uint32_t> parent(std::uint32_t i) {
        if (i == 0) return std::nullopt;
        return (i - 1) / 2;
    }
};

// Wire encoding of one table row: (owner, committee members).
inline Bytes pc_entry_bytes(std::uint32_t owner, const std::vector<std::uint32_t>& members) {
    Writer w;
    w.u32(owner);
    w.u32(std::uint32_t(members.size()));
    for (std::uint32_t m : members) w.u32(m);
    return w.take();
}

inline std::pair<std::uint32_t, std::vector<std::uint32_t>> pc_entry_parse(const Bytes& b) {
    Reader r(b);
    std::uint32_t owner = r.u32();
    std::uint32_t count = r.u32();
    require(count <= (b.size() - 8) / 4 + 1, "pc_entry_parse: bad count");
    std::vector<std::uint32_t> members(count);
    for (auto& m : members) m = r.u32();
    return {owner, std::move(members)};
}

} // namespace gmpc
