#pragma once

// Synchronous round scheduler. A round has a send phase (parties submit
// envelopes) and a receive phase (envelopes released after the barrier).
// Every envelope passes through the server's hands: a corrupted server
// observes all (src, dst, length) metadata and suppresses any subset; an
// honest server applies only the anti-flooding guard. Receivers cannot
// tell a suppressed envelope from one that was never sent.

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gmpc/net/adversary.hpp"
#include "gmpc/net/envelope.hpp"
#include "gmpc/net/metrics.hpp"
#include "gmpc/net/transcript.hpp"
#include "gmpc/serialize.hpp"

namespace gmpc {

struct SimConfig {
    std::uint32_t n = 0;      // number of users (ids 1..n)
    std::uint32_t kappa = 0;  // committee-size security parameter
    double alpha = 0.0;       // corrupted-user fraction bound
    std::uint64_t seed = 0;
    std::uint64_t delta = 0;  // flooding guard parameter; 0 = default below
    bool star_mode = false;
};

inline std::uint64_t default_delta(std::uint32_t n, std::uint32_t kappa) {
    std::uint64_t lg = ceil_log2(std::max<std::uint64_t>(2, n));
    return std::uint64_t(kappa) * lg * lg;
}

// Anti-flooding rule (honest server): a receiver contacted by more than
// delta^3 distinct senders in one round is being flooded; every party that
// contacted it this round is cut off permanently.
inline std::set<PartyId> ddos_guard(const std::vector<Envelope>& intents, std::uint64_t delta) {
    std::map<PartyId, std::set<PartyId>> contactors;
    for (const Envelope& e : intents) contactors[e.dst].insert(e.src);
    std::uint64_t threshold = delta * delta * delta;
    std::set<PartyId> blocked;
    for (auto& [victim, senders] : contactors)
        if (senders.size() > threshold)
            for (PartyId s : senders) blocked.insert(s);
    return blocked;
}

class Net {
public:
    Net(const SimConfig& cfg, const AdversarySpec& adv)
        : cfg_(cfg), adv_(adv), metrics_(cfg.n) {
        if (cfg_.delta == 0) cfg_.delta = default_delta(cfg_.n, cfg_.kappa);
        next_virtual_ = cfg_.n + 1;
    }

    const SimConfig& config() const { return cfg_; }
    const AdversarySpec& adversary() const { return adv_; }
    std::uint32_t round() const { return round_; }

    PartyId add_virtual(std::vector<std::uint32_t> members) {
        PartyId id(next_virtual_++);
        members_[id] = std::move(members);
        return id;
    }

    const std::vector<std::uint32_t>& members(PartyId p) const {
        static const std::vector<std::uint32_t> none;
        auto it = members_.find(p);
        return it == members_.end() ? none : it->second;
    }

    // ---- send phase ----
    void submit(PartyId src, PartyId dst, Bytes payload) {
        if (aborted_.count(src))
            throw std::logic_error("Net::submit: intent from an aborted party");
        pending_.push_back(Envelope{src, dst, round_, std::move(payload)});
    }

    // ---- barrier: filter and deliver ----
    void step() {
        // Canonical order: by (src, dst), submission order as tiebreak.
        std::stable_sort(pending_.begin(), pending_.end(), [](const Envelope& a, const Envelope& b) {
            return a.src < b.src || (a.src == b.src && a.dst < b.dst);
        });
        std::vector<MetaRecord> meta;
        meta.reserve(pending_.size());
        for (std::size_t i = 0; i < pending_.size(); ++i) {
            const Envelope& e = pending_[i];
            transcript_.log(round_, EventType::Intent, e.src, e.dst, e.length());
            meta.push_back({i, e.src, e.dst, e.length()});
            if (adv_.server_corrupted) observe_meta(e);
        }

        std::set<std::size_t> suppressed;
        if (adv_.server_corrupted) {
            for (std::size_t i : adv_.strat().select_blocks(round_, meta))
                if (i < pending_.size()) suppressed.insert(i);
        } else {
            for (PartyId p : ddos_guard(pending_, cfg_.delta))
                if (!cut_off_.count(p)) {
                    cut_off_.insert(p);
                    transcript_.log(round_, EventType::DdosBlock, p, p, 0);
                }
        }

        for (std::size_t i = 0; i < pending_.size(); ++i) {
            Envelope& e = pending_[i];
            bool blocked = suppressed.count(i) != 0 || cut_off_.count(e.src) != 0 ||
                           cut_off_.count(e.dst) != 0;
            if (blocked) {
                transcript_.log(round_, EventType::Block, e.src, e.dst, e.length());
                metrics_.record_block();
                continue;
            }
            if (aborted_.count(e.dst)) {
                // The sender (and the server, which relays) learns the
                // destination is gone; nothing is delivered.
                notices_.push_back({e.src, e.dst});
                continue;
            }
            transcript_.log(round_, EventType::Deliver, e.src, e.dst, e.length());
            metrics_.record_delivery(e.src, e.dst, e.length(), members(e.src), members(e.dst));
            inbox_[e.dst].push_back(std::move(e));
        }
        pending_.clear();
        ++round_;
    }

    // ---- receive phase ----
    std::vector<Envelope> take_inbox(PartyId p) {
        auto it = inbox_.find(p);
        if (it == inbox_.end()) return {};
        std::vector<Envelope> out = std::move(it->second);
        inbox_.erase(it);
        return out;
    }

    // Abort notices observed by senders that tried to contact a gone party.
    std::vector<std::pair<PartyId, PartyId>> take_notices() { return std::exchange(notices_, {}); }

    void abort_party(PartyId p) {
        if (aborted_.insert(p).second) transcript_.log(round_, EventType::Abort, p, p, 0);
    }

    void note(PartyId p, std::uint64_t tag) { transcript_.log(round_, EventType::Note, p, p, tag); }

    bool is_aborted(PartyId p) const { return aborted_.count(p) != 0; }
    bool is_cut_off(PartyId p) const { return cut_off_.count(p) != 0; }
    const std::set<PartyId>& aborted() const { return aborted_; }
    const std::set<PartyId>& cut_off() const { return cut_off_; }

    Metrics& metrics() { return metrics_; }
    const Metrics& metrics() const { return metrics_; }
    Transcript& transcript() { return transcript_; }
    const Transcript& transcript() const { return transcript_; }

    // What the adversary has seen: metadata of all rounds (corrupted server
    // only) plus payload bytes of envelopes touching corrupted parties.
    const Bytes& adversary_view() const { return adv_view_; }

private:
    void observe_meta(const Envelope& e) {
        Writer w;
        w.u32(e.round);
        w.u32(e.src.v);
        w.u32(e.dst.v);
        w.u64(e.length());
        if (adv_.is_corrupted(e.src) || adv_.is_corrupted(e.dst)) w.blob(e.payload);
        Bytes rec = w.take();
        adv_view_.insert(adv_view_.end(), rec.begin(), rec.end());
    }

    SimConfig cfg_;
    AdversarySpec adv_;
    Metrics metrics_;
    Transcript transcript_;
    std::uint32_t round_ = 0;
    std::uint32_t next_virtual_ = 1;
    std::vector<Envelope> pending_;
    std::map<PartyId, std::vector<Envelope>> inbox_;
    std::map<PartyId, std::vector<std::uint32_t>> members_;
    std::set<PartyId> aborted_;
    std::set<PartyId> cut_off_;
    std::vector<std::pair<PartyId, PartyId>> notices_;
    Bytes adv_view_;
};

} // namespace gmpc
