#pragma once

// Communication and computation accounting.
//
// Two layers:
//  * party counters — every delivered envelope increments exactly one
//    sender entry and one receiver entry, keyed by PartyId (virtual
//    committee parties included);
//  * user load — the per-user cost implied by the delivery. For plain
//    user/server traffic this equals the party counter. For committee
//    traffic one logical envelope stands for the member-level share
//    fan-out (each member of the sending committee sends one share to each
//    member of the receiving committee), and the load table accrues that
//    expansion so complexity claims are measured at user granularity.

#include <cstdint>
#include <map>
#include <vector>

#include "gmpc/net/party.hpp"

namespace gmpc {

struct LoadCounters {
    std::uint64_t msgs_sent = 0;
    std::uint64_t msgs_recv = 0;
    std::uint64_t bytes_sent = 0;
    std::uint64_t bytes_recv = 0;
};

class Metrics {
public:
    explicit Metrics(std::uint32_t n_users = 0) : user_load_(n_users + 1) {}

    // members_src/members_dst are empty for plain parties; for virtual
    // parties they list the user ids acting through them.
    void record_delivery(PartyId src, PartyId dst, std::size_t bytes,
                         const std::vector<std::uint32_t>& members_src,
                         const std::vector<std::uint32_t>& members_dst) {
        auto& s = party_[src];
        s.msgs_sent += 1;
        s.bytes_sent += bytes;
        auto& d = party_[dst];
        d.msgs_recv += 1;
        d.bytes_recv += bytes;
        ++deliveries_;

        // A share of an L-byte value is itself ~L bytes, so a member that
        // fans out to f receivers sends f messages of ~L bytes.
        std::size_t fan_src = members_dst.empty() ? 1 : members_dst.size();
        std::size_t fan_dst = members_src.empty() ? 1 : members_src.size();
        if (members_src.empty()) {
            bump_user_send(src, fan_src, bytes * fan_src);
        } else {
            for (std::uint32_t u : members_src)
                bump_user_send(PartyId::user(u), fan_src, bytes * fan_src);
        }
        if (members_dst.empty()) {
            bump_user_recv(dst, fan_dst, bytes * fan_dst);
        } else {
            for (std::uint32_t u : members_dst)
                bump_user_recv(PartyId::user(u), fan_dst, bytes * fan_dst);
        }
    }

    void record_block() { ++blocked_; }
    void record_compute(PartyId p, std::uint64_t field_ops) { compute_[p] += field_ops; }

    const LoadCounters& party(PartyId p) const {
        static const LoadCounters zero{};
        auto it = party_.find(p);
        return it == party_.end() ? zero : it->second;
    }

    // User-level load (id 0 = server).
    const LoadCounters& user_load(std::uint32_t user) const { return user_load_.at(user); }
    std::uint64_t compute_ops(PartyId p) const {
        auto it = compute_.find(p);
        return it == compute_.end() ? 0 : it->second;
    }

    std::uint64_t deliveries() const { return deliveries_; }
    std::uint64_t blocked() const { return blocked_; }

    std::uint64_t max_user_msgs() const {
        std::uint64_t best = 0;
        for (std::size_t i = 1; i < user_load_.size(); ++i)
            best = std::max(best, user_load_[i].msgs_sent + user_load_[i].msgs_recv);
        return best;
    }

    std::uint64_t max_user_bytes() const {
        std::uint64_t best = 0;
        for (std::size_t i = 1; i < user_load_.size(); ++i)
            best = std::max(best, user_load_[i].bytes_sent + user_load_[i].bytes_recv);
        return best;
    }

    std::size_t n_users() const { return user_load_.size() - 1; }

private:
    void bump_user_send(PartyId p, std::uint64_t msgs, std::uint64_t bytes) {
        if (p.v < user_load_.size()) {
            user_load_[p.v].msgs_sent += msgs;
            user_load_[p.v].bytes_sent += bytes;
        }
    }
    void bump_user_recv(PartyId p, std::uint64_t msgs, std::uint64_t bytes) {
        if (p.v < user_load_.size()) {
            user_load_[p.v].msgs_recv += msgs;
            user_load_[p.v].bytes_recv += bytes;
        }
    }

    std::map<PartyId, LoadCounters> party_;
    std::map<PartyId, std::uint64_t> compute_;
    std::vector<LoadCounters> user_load_;
    std::uint64_t deliveries_ = 0;
    std::uint64_t blocked_ = 0;
};

} // namespace gmpc
