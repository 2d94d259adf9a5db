#pragma once

// Committee sampling between each user and the server.
//
// A commit-reveal coin toss fixes each user's committee string; the server
// then publishes a vector commitment to the table of all committees and
// must open it consistently. Users audit the table three ways: their own
// row, roots relayed through kappa sampled peers (the relayed root must
// equal their own — that is what catches equivocation), and a fresh
// kappa-position query audit verified under every relayed root. Verified
// membership claims, per-committee liveness votes and a global ping round
// then fix the alive list. The server can only remove users by making
// them abort, and bulk removal trips the remaining users' audits.
//
// The runner plays every party's state machine over the round scheduler;
// corrupted parties deviate exactly where the adversary strategy hooks
// say so. All randomness forks off the caller's stream, so a run is a
// pure function of (config, adversary, seed).

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gmpc/committees/subset.hpp"
#include "gmpc/committees/types.hpp"
#include "gmpc/crypto/commitment.hpp"
#include "gmpc/crypto/merkle.hpp"
#include "gmpc/net/simulator.hpp"

namespace gmpc {

// Round offsets relative to net.round() at entry, for round-targeted
// blocking strategies.
struct PcRound {
    static constexpr std::uint32_t coin_commit = 0;    // user -> server
    static constexpr std::uint32_t coin_out = 1;       // server -> user
    static constexpr std::uint32_t decommit = 2;       // user -> server
    static constexpr std::uint32_t pp_in = 3;          // user -> server
    static constexpr std::uint32_t table_out = 4;      // server -> user
    static constexpr std::uint32_t sample_notify = 5;  // user -> peers + server
    static constexpr std::uint32_t sample_respond = 6; // peer -> sampler
    static constexpr std::uint32_t open_self = 7;      // server -> user
    static constexpr std::uint32_t query_in = 8;       // user -> server
    static constexpr std::uint32_t query_out = 9;      // server -> user
    static constexpr std::uint32_t member_claim = 10;  // user -> committee members
    static constexpr std::uint32_t claim_open = 11;    // server -> member
    static constexpr std::uint32_t pc_vote = 12;       // member -> committee
    static constexpr std::uint32_t ping = 13;          // user -> sampled users
    static constexpr std::uint32_t ping_reply = 14;    // pinged user -> sender
    static constexpr std::uint32_t count = 15;
};

// Server-side commitment state: one tree for the honest table plus
// substitute trees for viewers the server equivocates against. Substitute
// trees are content-addressed, so viewers shown the same falsified table
// see the same root -- building a fresh tree per viewer would make the
// shown roots disagree among themselves and defeat the equivocation.
struct ServerVc {
    VcParams pp;
    VcAux aux;
    VcCommitment root{};
    std::map<std::uint32_t, std::shared_ptr<const VcAux>> viewer_aux;
    std::map<std::uint32_t, VcCommitment> viewer_root;

    const VcAux& aux_for(std::uint32_t viewer) const {
        auto it = viewer_aux.find(viewer);
        return it == viewer_aux.end() ? aux : *it->second;
    }
    const VcCommitment& root_for(std::uint32_t viewer) const {
        auto it = viewer_root.find(viewer);
        return it == viewer_root.end() ? root : it->second;
    }
};

struct PcRunOutcome {
    std::vector<PersonalCommittee> pc; // by owner; members empty if none fixed
    std::vector<bool> user_aborted;    // by user id; index 0 unused
    std::vector<std::string> abort_phase;
    std::set<std::uint32_t> inactive; // labeled by the server at decommit
    // Verified membership knowledge per user: (owner, committee) pairs,
    // sorted by owner.
    std::vector<std::vector<std::pair<std::uint32_t, std::vector<std::uint32_t>>>> memberships;
    std::vector<std::uint32_t> alive; // the server's final alive list, sorted
    // Commitment state the graph stage keeps opening.
    ServerVc vc;
    std::vector<Bytes> table;            // committed row bytes, by position
    std::vector<VcCommitment> user_root; // root each user accepted
    std::vector<PartyId> pc_party;       // virtual party per owner (0 = none)
    std::uint32_t first_round = 0;
};

namespace pcwire {

// Openings grouped by the commitment root they belong to. Byte-identical
// opening sets are sent once per distinct root; receivers verify against
// the roots they hold, so the dedup changes nothing semantically.
struct OpenGroup {
    VcCommitment root{};
    std::vector<VcOpening> openings;
    std::vector<std::uint32_t> ids; // tree owners this group covers
};

inline void write_groups(Writer& w, const std::vector<OpenGroup>& gs) {
    w.u32(std::uint32_t(gs.size()));
    for (const auto& g : gs) {
        w.raw(Bytes(g.root.begin(), g.root.end()));
        w.u32(std::uint32_t(g.openings.size()));
        for (const auto& o : g.openings) write_opening(w, o);
        w.u32(std::uint32_t(g.ids.size()));
        for (auto id : g.ids) w.u32(id);
    }
}

inline std::vector<OpenGroup> read_groups(Reader& r) {
    std::uint32_t ng = r.u32();
    require(ng <= r.remaining() / 40, "read_groups: bad group count");
    std::vector<OpenGroup> gs(ng);
    for (auto& g : gs) {
        Bytes root = r.fixed(32);
        std::copy(root.begin(), root.end(), g.root.begin());
        std::uint32_t no = r.u32();
        require(no <= r.remaining() / 16, "read_groups: bad opening count");
        g.openings.reserve(no);
        for (std::uint32_t i = 0; i < no; ++i) g.openings.push_back(read_opening(r));
        std::uint32_t ni = r.u32();
        require(ni <= r.remaining() / 4, "read_groups: bad id count");
        g.ids.resize(ni);
        for (auto& id : g.ids) id = r.u32();
    }
    return gs;
}

} // namespace pcwire

inline PcRunOutcome run_personal_committee(Net& net, Rng& rng) {
    const SimConfig& cfg = net.config();
    const std::uint32_t n = cfg.n;
    const std::uint32_t kappa = cfg.kappa;
    require(n >= 2 && kappa >= 1 && kappa + 1 <= n, "run_personal_committee: bad sizes");
    const double eps = epsilon_slack(cfg.alpha);
    // "at least this many consistent/replies" (audit and ping steps).
    const double need_consistent = (1 - 2 * cfg.alpha - eps / 2) * kappa;
    // "more than this many members silent" kills a committee.
    const double max_silent = (cfg.alpha + eps / 2) * kappa;
    const AdversarySpec& adv = net.adversary();
    Strategy& strat = adv.strat();
    const PartyId srv = PartyId::server();

    auto silent = [&](std::uint32_t u, std::string_view phase) {
        return adv.is_corrupted(PartyId::user(u)) && strat.user_silent(u, phase);
    };
    auto payload = [&](std::uint32_t u, std::string_view phase, Bytes honest) {
        if (adv.is_corrupted(PartyId::user(u)))
            if (auto sub = strat.user_payload(u, phase, honest)) return *sub;
        return honest;
    };

    PcRunOutcome out;
    out.first_round = net.round();
    out.pc.resize(n + 1);
    for (std::uint32_t i = 1; i <= n; ++i) out.pc[i].owner = i;
    out.user_aborted.assign(n + 1, false);
    out.abort_phase.assign(n + 1, "");
    out.memberships.resize(n + 1);
    out.user_root.assign(n + 1, VcCommitment{});
    out.pc_party.assign(n + 1, PartyId(0));
    out.table.assign(n + 1, Bytes{});

    auto abort_user = [&](std::uint32_t i, const char* phase) {
        if (out.user_aborted[i]) return;
        out.user_aborted[i] = true;
        out.abort_phase[i] = phase;
        net.abort_party(PartyId::user(i));
    };
    auto acting = [&](std::uint32_t i) { return !out.user_aborted[i]; };

    // ---- coin toss: commit, server half, decommit ----
    const std::size_t coin_bytes = subset_string_bytes(kappa, n);
    std::vector<Bytes> r_str(n + 1), s_str(n + 1);
    std::vector<CommitOpening> r_open(n + 1);
    std::vector<bool> committed(n + 1, false), got_s(n + 1, false);
    std::map<std::uint32_t, Digest> seen_commit;

    for (std::uint32_t i = 1; i <= n; ++i) {
        Rng urng = rng.fork("pc-coin", i);
        r_str[i] = urng.bytes(coin_bytes);
        auto [c, op] = commit(r_str[i], urng);
        r_open[i] = std::move(op);
        if (silent(i, "pc-commit")) continue;
        net.submit(PartyId::user(i), srv, payload(i, "pc-commit", Bytes(c.begin(), c.end())));
    }
    net.step(); // coin_commit
    for (auto& e : net.take_inbox(srv)) {
        if (e.payload.size() != 32 || e.src.v < 1 || e.src.v > n) continue;
        Digest d;
        std::copy(e.payload.begin(), e.payload.end(), d.begin());
        seen_commit[e.src.v] = d;
        committed[e.src.v] = true;
    }

    Rng server_rng = rng.fork("pc-server");
    for (std::uint32_t i = 1; i <= n; ++i) {
        s_str[i] = server_rng.fork("coin", i).bytes(coin_bytes);
        if (committed[i]) net.submit(srv, PartyId::user(i), s_str[i]);
    }
    net.step(); // coin_out
    std::vector<Bytes> user_s(n + 1);
    for (std::uint32_t i = 1; i <= n; ++i) {
        for (auto& e : net.take_inbox(PartyId::user(i)))
            if (e.src == srv && e.payload.size() == coin_bytes) {
                user_s[i] = std::move(e.payload);
                got_s[i] = true;
            }
        if (committed[i] && !got_s[i] && acting(i)) abort_user(i, "coin");
    }

    for (std::uint32_t i = 1; i <= n; ++i) {
        if (!acting(i) || !committed[i] || silent(i, "pc-decommit")) continue;
        Writer w;
        w.blob(r_open[i].salt);
        w.blob(r_open[i].message);
        net.submit(PartyId::user(i), srv, payload(i, "pc-decommit", w.take()));
    }
    net.step(); // decommit

    // Server fixes each user's committee row; anything malformed means the
    // user is out of the table.
    std::vector<std::vector<std::uint32_t>> committee(n + 1); // server view
    std::vector<std::vector<std::uint32_t>> user_committee(n + 1);
    {
        std::map<std::uint32_t, Bytes> decommits;
        for (auto& e : net.take_inbox(srv))
            if (e.src.v >= 1 && e.src.v <= n) decommits[e.src.v] = std::move(e.payload);
        for (std::uint32_t i = 1; i <= n; ++i) {
            bool ok = false;
            auto it = decommits.find(i);
            if (committed[i] && it != decommits.end()) {
                try {
                    Reader rd(it->second);
                    CommitOpening op;
                    op.salt = rd.blob();
                    op.message = rd.blob();
                    if (rd.done() && op.message.size() == coin_bytes &&
                        commit_verify(seen_commit[i], op)) {
                        committee[i] = subset_from_bytes(xor_strings(op.message, s_str[i]),
                                                         kappa, n);
                        ok = true;
                    }
                } catch (const std::exception&) {
                    ok = false;
                }
            }
            if (!ok) out.inactive.insert(i);
            if (got_s[i])
                user_committee[i] = subset_from_bytes(xor_strings(r_str[i], user_s[i]), kappa, n);
        }
    }

    for (std::uint32_t i = 1; i <= n; ++i) {
        if (!acting(i) || !committed[i] || silent(i, "pc-pp")) continue;
        Writer w;
        w.u32(n);
        net.submit(PartyId::user(i), srv, payload(i, "pc-pp", w.take()));
    }
    net.step(); // pp_in
    net.take_inbox(srv); // the parameters are deterministic in n

    // ---- table commitment, self-row openings ----
    out.vc.pp = vc_setup(n);
    std::vector<Bytes> leaves(n);
    for (std::uint32_t p = 1; p <= n; ++p) {
        out.table[p] = pc_entry_bytes(p, committee[p]);
        leaves[p - 1] = out.table[p];
    }
    {
        Rng vcrng = rng.fork("pc-vc");
        auto [aux, root] = vc_commit(out.vc.pp, leaves, vcrng);
        out.vc.aux = std::move(aux);
        out.vc.root = root;
        if (adv.server_corrupted) {
            Bytes salt_base = vcrng.bytes(32);
            std::map<Digest, std::pair<std::shared_ptr<const VcAux>, VcCommitment>> cache;
            for (std::uint32_t viewer = 1; viewer <= n; ++viewer) {
                std::map<std::uint32_t, Bytes> subs;
                for (std::uint32_t p = 1; p <= n; ++p)
                    if (auto sub = strat.pc_table_entry(viewer, p, leaves[p - 1]))
                        subs[p - 1] = std::move(*sub);
                if (subs.empty()) continue;
                Writer kw;
                for (auto& [pos, b] : subs) {
                    kw.u32(pos);
                    kw.blob(b);
                }
                Digest key = tagged_hash("pc-equiv-tree", salt_base, kw.take());
                auto it = cache.find(key);
                if (it == cache.end()) {
                    std::vector<Bytes> alt = leaves;
                    for (auto& [pos, b] : subs) alt[pos] = std::move(b);
                    Rng vrng(key);
                    auto [a2, r2] = vc_commit(out.vc.pp, alt, vrng);
                    it = cache.emplace(key, std::pair{std::make_shared<VcAux>(std::move(a2)), r2})
                             .first;
                }
                out.vc.viewer_aux[viewer] = it->second.first;
                out.vc.viewer_root[viewer] = it->second.second;
            }
        }
    }
    for (std::uint32_t i = 1; i <= n; ++i) {
        if (out.inactive.count(i)) continue;
        Writer w;
        w.u32(out.vc.pp.size);
        const VcCommitment& rt = out.vc.root_for(i);
        w.raw(Bytes(rt.begin(), rt.end()));
        write_opening(w, vc_open_one(out.vc.aux_for(i), i - 1));
        net.submit(srv, PartyId::user(i), w.take());
    }
    net.step(); // table_out
    for (std::uint32_t i = 1; i <= n; ++i) {
        auto in = net.take_inbox(PartyId::user(i));
        if (!acting(i) || !committed[i]) continue;
        bool ok = false;
        Bytes my_row = pc_entry_bytes(i, user_committee[i]);
        for (auto& e : in) {
            if (!(e.src == srv)) continue;
            try {
                Reader rd(e.payload);
                if (rd.u32() != n) continue;
                Bytes rootb = rd.fixed(32);
                VcOpening op = read_opening(rd);
                if (!rd.done()) continue;
                VcCommitment rt{};
                std::copy(rootb.begin(), rootb.end(), rt.begin());
                if (op.index == i - 1 && op.value == my_row &&
                    vc_verify_one(out.vc.pp, rt, op)) {
                    out.user_root[i] = rt;
                    ok = true;
                }
            } catch (const std::exception&) {
            }
        }
        if (!ok) abort_user(i, "table-self");
    }

    // ---- sampled cross-audit of the table ----
    std::vector<std::vector<std::uint32_t>> s_out(n + 1);
    for (std::uint32_t i = 1; i <= n; ++i) {
        if (!acting(i) || !committed[i]) continue;
        Rng org = rng.fork("pc-sout", i);
        s_out[i] = sample_peers(org, kappa, n, i);
        if (silent(i, "pc-sample-notify")) continue;
        for (auto j : s_out[i]) net.submit(PartyId::user(i), PartyId::user(j), Bytes{1});
        net.submit(PartyId::user(i), srv, Bytes{1});
    }
    net.step(); // sample_notify
    net.take_inbox(srv);
    std::vector<std::set<std::uint32_t>> s_in(n + 1);
    for (std::uint32_t j = 1; j <= n; ++j) {
        auto in = net.take_inbox(PartyId::user(j));
        if (!acting(j)) continue;
        for (auto& e : in)
            if (e.src.v >= 1 && e.src.v <= n) s_in[j].insert(e.src.v);
        if (s_in[j].size() > 3 * std::size_t(kappa)) abort_user(j, "sample-in");
    }

    for (std::uint32_t j = 1; j <= n; ++j) {
        if (!acting(j) || silent(j, "pc-crosscheck-respond")) continue;
        Writer w;
        w.u32(n);
        const VcCommitment& rt = out.user_root[j];
        w.raw(Bytes(rt.begin(), rt.end()));
        Bytes msg = payload(j, "pc-crosscheck-respond", w.take());
        for (auto i : s_in[j]) net.submit(PartyId::user(j), PartyId::user(i), msg);
    }
    net.step(); // sample_respond
    // resp_root[i]: root each responder forwarded; the delivered set is also
    // exactly what the relaying server knows as S_i.
    std::vector<std::map<std::uint32_t, VcCommitment>> resp_root(n + 1);
    for (std::uint32_t i = 1; i <= n; ++i) {
        auto in = net.take_inbox(PartyId::user(i));
        if (!acting(i)) continue;
        for (auto& e : in) {
            if (e.src.v < 1 || e.src.v > n) continue;
            if (!std::binary_search(s_out[i].begin(), s_out[i].end(), e.src.v)) continue;
            try {
                Reader rd(e.payload);
                if (rd.u32() != n) continue;
                Bytes rootb = rd.fixed(32);
                if (!rd.done()) continue;
                VcCommitment rt{};
                std::copy(rootb.begin(), rootb.end(), rt.begin());
                resp_root[i][e.src.v] = rt;
            } catch (const std::exception&) {
            }
        }
    }

    for (std::uint32_t i = 1; i <= n; ++i) {
        if (resp_root[i].empty() || out.inactive.count(i)) continue;
        std::map<VcCommitment, pcwire::OpenGroup> groups;
        for (auto& [j, rt] : resp_root[i]) {
            (void)rt; // the server opens under its own view of j's tree
            const VcCommitment& jr = out.vc.root_for(j);
            auto& g = groups[jr];
            if (g.openings.empty()) {
                g.root = jr;
                g.openings.push_back(vc_open_one(out.vc.aux_for(j), i - 1));
            }
            g.ids.push_back(j);
        }
        std::vector<pcwire::OpenGroup> gs;
        for (auto& [rt, g] : groups) gs.push_back(std::move(g));
        Writer w;
        pcwire::write_groups(w, gs);
        net.submit(srv, PartyId::user(i), w.take());
    }
    net.step(); // open_self
    for (std::uint32_t i = 1; i <= n; ++i) {
        auto in = net.take_inbox(PartyId::user(i));
        if (!acting(i) || !committed[i]) continue;
        // A responder is consistent when it forwarded my root and the server
        // opened that root at my position to my committee row.
        bool my_group_ok = false;
        Bytes my_row = pc_entry_bytes(i, user_committee[i]);
        for (auto& e : in) {
            if (!(e.src == srv)) continue;
            try {
                Reader rd(e.payload);
                auto gs = pcwire::read_groups(rd);
                for (auto& g : gs) {
                    if (g.root != out.user_root[i]) continue;
                    for (auto& op : g.openings)
                        if (op.index == i - 1 && op.value == my_row &&
                            vc_verify_one(out.vc.pp, g.root, op))
                            my_group_ok = true;
                }
            } catch (const std::exception&) {
            }
        }
        std::size_t consistent = 0;
        if (my_group_ok)
            for (auto& [j, rt] : resp_root[i])
                if (rt == out.user_root[i]) ++consistent;
        if (double(consistent) + 1e-6 < need_consistent) abort_user(i, "crosscheck");
    }

    // ---- query-set audit ----
    std::vector<std::vector<std::uint32_t>> query(n + 1);
    for (std::uint32_t i = 1; i <= n; ++i) {
        if (!acting(i) || !committed[i]) continue;
        Rng qrng = rng.fork("pc-query", i);
        query[i] = subset_sample(qrng, kappa, n);
        if (silent(i, "pc-query")) continue;
        Writer w;
        w.u32(std::uint32_t(query[i].size()));
        for (auto q : query[i]) w.u32(q);
        net.submit(PartyId::user(i), srv, payload(i, "pc-query", w.take()));
    }
    net.step(); // query_in
    std::map<std::uint32_t, std::vector<std::uint32_t>> q_asked;
    for (auto& e : net.take_inbox(srv)) {
        if (e.src.v < 1 || e.src.v > n) continue;
        try {
            Reader rd(e.payload);
            std::uint32_t cnt = rd.u32();
            if (cnt > n || cnt * 4ull != rd.remaining()) continue;
            std::vector<std::uint32_t> qs(cnt);
            bool ok = true;
            for (auto& q : qs) {
                q = rd.u32();
                if (q < 1 || q > n) ok = false;
            }
            if (ok) q_asked[e.src.v] = std::move(qs);
        } catch (const std::exception&) {
        }
    }
    for (auto& [i, qs] : q_asked) {
        if (out.inactive.count(i)) continue;
        // Purported values come from the asker's own view; openings cover
        // every distinct root among its responders (and itself).
        const VcAux& own = out.vc.aux_for(i);
        Writer w;
        w.u32(std::uint32_t(qs.size()));
        for (auto q : qs) w.blob(own.values[q - 1]);
        std::map<VcCommitment, pcwire::OpenGroup> groups;
        auto add_tree = [&](std::uint32_t owner) {
            const VcCommitment& rt = out.vc.root_for(owner);
            auto& g = groups[rt];
            if (g.openings.empty()) {
                g.root = rt;
                const VcAux& aux = out.vc.aux_for(owner);
                for (auto q : qs) g.openings.push_back(vc_open_one(aux, q - 1));
            }
            g.ids.push_back(owner);
        };
        add_tree(i);
        for (auto& [j, rt] : resp_root[i]) {
            (void)rt;
            add_tree(j);
        }
        std::vector<pcwire::OpenGroup> gs;
        for (auto& [rt, g] : groups) gs.push_back(std::move(g));
        pcwire::write_groups(w, gs);
        net.submit(srv, PartyId::user(i), w.take());
    }
    net.step(); // query_out
    for (std::uint32_t i = 1; i <= n; ++i) {
        auto in = net.take_inbox(PartyId::user(i));
        if (!acting(i) || !committed[i]) continue;
        bool ok = false;
        for (auto& e : in) {
            if (!(e.src == srv)) continue;
            try {
                Reader rd(e.payload);
                std::uint32_t cnt = rd.u32();
                if (cnt != query[i].size()) continue;
                std::vector<Bytes> u(cnt);
                for (auto& b : u) b = rd.blob();
                auto gs = pcwire::read_groups(rd);
                if (!rd.done()) continue;
                std::map<VcCommitment, const pcwire::OpenGroup*> by_root;
                for (auto& g : gs)
                    if (!by_root.count(g.root)) by_root[g.root] = &g;
                auto tree_ok = [&](const VcCommitment& rt) {
                    auto it = by_root.find(rt);
                    if (it == by_root.end()) return false;
                    const auto& ops = it->second->openings;
                    if (ops.size() != query[i].size()) return false;
                    for (std::size_t k = 0; k < ops.size(); ++k) {
                        if (ops[k].index != query[i][k] - 1) return false;
                        if (ops[k].value != u[k]) return false;
                        if (!vc_verify_one(out.vc.pp, rt, ops[k])) return false;
                    }
                    return true;
                };
                bool all = tree_ok(out.user_root[i]);
                for (auto& [j, rt] : resp_root[i])
                    if (all && !tree_ok(rt)) all = false;
                ok = all;
            } catch (const std::exception&) {
            }
        }
        if (!ok) abort_user(i, "query");
    }

    // ---- membership claims ----
    for (std::uint32_t i = 1; i <= n; ++i) {
        if (!acting(i) || !committed[i] || silent(i, "pc-membership")) continue;
        Bytes row = payload(i, "pc-membership", pc_entry_bytes(i, user_committee[i]));
        for (auto j : user_committee[i])
            if (j != i) net.submit(PartyId::user(i), PartyId::user(j), row);
    }
    net.step(); // member_claim
    std::vector<std::map<std::uint32_t, std::vector<std::uint32_t>>> claims(n + 1);
    for (std::uint32_t j = 1; j <= n; ++j) {
        auto in = net.take_inbox(PartyId::user(j));
        if (!acting(j)) continue;
        if (in.size() > 3 * std::size_t(kappa)) {
            abort_user(j, "member-claims");
            continue;
        }
        for (auto& e : in) {
            if (e.src.v < 1 || e.src.v > n) continue;
            try {
                auto [owner, members] = pc_entry_parse(e.payload);
                if (owner != e.src.v || members.size() != kappa) continue;
                if (!std::binary_search(members.begin(), members.end(), j)) continue;
                claims[j][owner] = std::move(members);
            } catch (const std::exception&) {
            }
        }
    }

    for (std::uint32_t j = 1; j <= n; ++j) {
        if (claims[j].empty() || out.inactive.count(j)) continue;
        // One tree (the member's own), one opening per claimed owner.
        pcwire::OpenGroup g;
        g.root = out.vc.root_for(j);
        const VcAux& aux = out.vc.aux_for(j);
        for (auto& [owner, members] : claims[j]) {
            g.openings.push_back(vc_open_one(aux, owner - 1));
            g.ids.push_back(owner);
        }
        Writer w;
        pcwire::write_groups(w, {g});
        net.submit(srv, PartyId::user(j), w.take());
    }
    net.step(); // claim_open
    for (std::uint32_t j = 1; j <= n; ++j) {
        auto in = net.take_inbox(PartyId::user(j));
        if (!acting(j) || !committed[j]) continue;
        std::map<std::uint32_t, VcOpening> opened;
        for (auto& e : in) {
            if (!(e.src == srv)) continue;
            try {
                Reader rd(e.payload);
                for (auto& g : pcwire::read_groups(rd)) {
                    if (g.root != out.user_root[j]) continue;
                    for (auto& op : g.openings)
                        if (!opened.count(op.index)) opened[op.index] = op;
                }
            } catch (const std::exception&) {
            }
        }
        for (auto& [owner, members] : claims[j]) {
            auto it = opened.find(owner - 1);
            if (it == opened.end()) continue; // unvouched claim: ignored
            const VcOpening& op = it->second;
            if (op.value != pc_entry_bytes(owner, members)) continue;
            if (!vc_verify_one(out.vc.pp, out.user_root[j], op)) continue;
            out.memberships[j].push_back({owner, members});
        }
        if (std::binary_search(user_committee[j].begin(), user_committee[j].end(), j))
            out.memberships[j].push_back({j, user_committee[j]});
        std::sort(out.memberships[j].begin(), out.memberships[j].end());
    }

    // ---- per-committee liveness vote ----
    for (std::uint32_t i = 1; i <= n; ++i)
        if (!committee[i].empty()) out.pc_party[i] = net.add_virtual(committee[i]);
    for (std::uint32_t j = 1; j <= n; ++j) {
        if (!acting(j) || silent(j, "pc-alive")) continue;
        for (auto& [owner, members] : out.memberships[j])
            if (out.pc_party[owner].v != 0)
                net.submit(PartyId::user(j), out.pc_party[owner], Bytes{1});
    }
    net.step(); // pc_vote
    for (std::uint32_t i = 1; i <= n; ++i) {
        out.pc[i].members = committee[i];
        if (out.pc_party[i].v == 0) continue;
        std::set<std::uint32_t> votes;
        for (auto& e : net.take_inbox(out.pc_party[i]))
            if (std::binary_search(committee[i].begin(), committee[i].end(), e.src.v))
                votes.insert(e.src.v);
        double quiet = double(kappa) - double(votes.size());
        out.pc[i].active = !(quiet > max_silent + 1e-6);
        if (!out.pc[i].active && acting(i) && committed[i]) abort_user(i, "pc-vote");
    }

    // ---- global liveness ping ----
    std::vector<std::vector<std::uint32_t>> pinged(n + 1);
    for (std::uint32_t i = 1; i <= n; ++i) {
        if (!acting(i) || !committed[i]) continue;
        Rng prng = rng.fork("pc-ping", i);
        pinged[i] = sample_peers(prng, kappa, n, i);
        if (silent(i, "pc-ping")) continue;
        for (auto j : pinged[i]) net.submit(PartyId::user(i), PartyId::user(j), Bytes{1});
    }
    net.step(); // ping
    std::vector<std::vector<std::uint32_t>> ping_from(n + 1);
    for (std::uint32_t j = 1; j <= n; ++j) {
        auto in = net.take_inbox(PartyId::user(j));
        if (!acting(j)) continue;
        for (auto& e : in)
            if (e.src.v >= 1 && e.src.v <= n) ping_from[j].push_back(e.src.v);
    }
    for (std::uint32_t j = 1; j <= n; ++j) {
        if (!acting(j) || silent(j, "pc-ping-reply")) continue;
        for (auto s : ping_from[j]) net.submit(PartyId::user(j), PartyId::user(s), Bytes{1});
    }
    net.step(); // ping_reply
    for (std::uint32_t i = 1; i <= n; ++i) {
        auto in = net.take_inbox(PartyId::user(i));
        if (!acting(i) || !committed[i]) continue;
        std::set<std::uint32_t> replies;
        for (auto& e : in)
            if (std::binary_search(pinged[i].begin(), pinged[i].end(), e.src.v))
                replies.insert(e.src.v);
        if (double(replies.size()) + 1e-6 < need_consistent) abort_user(i, "ping");
    }

    // ---- outputs ----
    for (std::uint32_t i = 1; i <= n; ++i)
        if (acting(i) && !out.inactive.count(i) && out.pc[i].active) out.alive.push_back(i);
    return out;
}

} // namespace gmpc
