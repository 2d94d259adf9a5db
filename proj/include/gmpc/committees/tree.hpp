#pragma once

// Growing one elected committee into a full binary tree of n+1 committees,
// one per user.
//
// The elected root committee generates a signing keypair and publishes the
// public key two ways at once: directly to the server, and through its
// members' personal committees, which flood an (owner -> key) array over
// the neighbor graph. A personal committee accepts the key only when
// enough array slots agree — corrupted owners can poison their own slot
// but never reach the acceptance threshold — and hands it to its user.
//
// The root then spawns children level by level (node j gets children
// 2j+1 and 2j+2), passing the secret key down the tree. Each spawned
// committee proves it is genuine to its assigned user by signing a fresh
// nonce under a leaf index reserved for that node. Users answer alive;
// the totals are summed bottom-up, and if the root's total comes in under
// the survivor floor everyone is told to halt. A committee cut off from
// its parent never activates, which starves its whole subtree and drags
// the root's total down — blocking is visible even though no single user
// can see it happen.

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "gmpc/committees/setup.hpp"
#include "gmpc/crypto/signature.hpp"

namespace gmpc {

struct TreeOutcome {
    CommitteeTree tree;          // committees 0..n, plus the accepted key bytes
    bool produced = false;       // false when the run ended in a global halt
    bool floor_abort = false;    // alive total under (1 - alpha - eps/2) n
    bool root_abort = false;     // aggregation never reached the root intact
    std::uint32_t alive_total = 0;

    std::vector<bool> committee_active; // index 0..n: received the secret key
    std::vector<bool> user_has_pk;      // user accepted a flooded public key
    std::vector<bool> user_accepted;    // user verified its committee's nonce
    std::vector<bool> user_halted;      // no valid signed message, or told to halt
};

namespace treewire {

// Flooded key array: slots keyed by root-committee member id. A slot is
// either a key candidate or an explicit mismatch marker.
using KeySlots = std::map<std::uint32_t, std::optional<Bytes>>;

inline Bytes write_slots(const KeySlots& slots) {
    Writer w;
    w.u32(std::uint32_t(slots.size()));
    for (const auto& [id, val] : slots) {
        w.u32(id);
        w.u8(val.has_value() ? 1 : 0);
        if (val.has_value()) w.blob(*val);
    }
    return w.take();
}

inline KeySlots read_slots(const Bytes& b) {
    Reader r(b);
    KeySlots slots;
    std::uint32_t count = r.u32();
    require(count <= r.remaining() / 5, "key-slot array: count exceeds payload");
    for (std::uint32_t i = 0; i < count; ++i) {
        std::uint32_t id = r.u32();
        if (r.u8())
            slots[id] = r.blob();
        else
            slots[id] = std::nullopt;
    }
    return slots;
}

} // namespace treewire

inline TreeOutcome many_committees(Net& net, const PcsgWitness& wit,
                                   const std::vector<PartyId>& pc_party,
                                   const ElectionResult& c0, Rng& rng) {
    const SimConfig& cfg = net.config();
    const std::uint32_t n = wit.n;
    const std::uint32_t kappa = wit.kappa;
    const std::uint32_t iters = wit.flood_iterations;
    const double eps = epsilon_slack(cfg.alpha);
    const AdversarySpec& adv = net.adversary();
    Strategy& strat = adv.strat();
    const PartyId srv = PartyId::server();

    TreeOutcome out;
    out.committee_active.assign(n + 1, false);
    out.user_has_pk.assign(n + 1, false);
    out.user_accepted.assign(n + 1, false);
    out.user_halted.assign(n + 1, false);
    out.tree.committees.assign(n + 1, {});
    require(!c0.committee.empty(), "many_committees: empty root committee");
    out.tree.committees[0] = c0.committee;

    auto user_silent = [&](std::uint32_t u, std::string_view phase) {
        return adv.is_corrupted(PartyId::user(u)) && strat.user_silent(u, phase);
    };
    auto user_bytes = [&](std::uint32_t u, std::string_view phase, const Bytes& honest) {
        if (adv.is_corrupted(PartyId::user(u)))
            if (auto sub = strat.user_payload(u, phase, honest)) return *sub;
        return honest;
    };

    // ---- root keypair, published via server and personal committees ----
    Rng krng = rng.fork("tree-key");
    SigKeypair kp = sig_gen(krng, n + 1);
    const Bytes pk_bytes = kp.pk.serialize();

    const PartyId c0_party = net.add_virtual(c0.committee);
    net.submit(c0_party, srv, pk_bytes);
    for (std::uint32_t i : c0.committee)
        if (!net.is_aborted(PartyId::user(i))) net.submit(c0_party, PartyId::user(i), pk_bytes);
    net.step();
    net.take_inbox(srv); // the server holds pk_bytes from here on

    for (std::uint32_t i : c0.committee) {
        PartyId ui = PartyId::user(i);
        bool got = false;
        for (auto& e : net.take_inbox(ui))
            if (e.src == c0_party && !e.payload.empty()) got = true;
        if (!got || net.is_aborted(ui) || !wit.pc[i].active) continue;
        if (user_silent(i, "tree-pk-fwd")) continue;
        net.submit(ui, pc_party[i], user_bytes(i, "tree-pk-fwd", pk_bytes));
    }
    for (std::uint32_t i : c0.committee) {
        if (!wit.pc[i].active) continue;
        Bytes relayed = pk_bytes;
        if (adv.server_corrupted)
            if (auto sub = strat.relayed_key(i, pk_bytes)) relayed = *sub;
        net.submit(srv, pc_party[i], relayed);
    }
    net.step();

    // Slot for owner i: filled only when the member's forward and the
    // server's relay carried the same bytes.
    const std::set<std::uint32_t> root_set(c0.committee.begin(), c0.committee.end());
    std::vector<treewire::KeySlots> slots(n + 1);
    for (std::uint32_t i : root_set) {
        if (!wit.pc[i].active) continue;
        std::optional<Bytes> from_user, from_server;
        for (auto& e : net.take_inbox(pc_party[i])) {
            if (e.src == PartyId::user(i)) from_user = e.payload;
            if (e.src == srv) from_server = e.payload;
        }
        if (from_user && from_server && *from_user == *from_server)
            slots[i][i] = *from_user;
        else
            slots[i][i] = std::nullopt;
    }

    // Flood the arrays across the neighbor graph. Nothing halts here: a
    // blocked or missing array only slows a slot down, and the acceptance
    // threshold below decides the outcome.
    for (std::uint32_t t = 0; t <= iters; ++t) {
        for (std::uint32_t i : wit.alive)
            for (std::uint32_t j : wit.neighbors[i]) {
                if (pc_party[j] == PartyId(0)) continue;
                net.submit(pc_party[i], pc_party[j], treewire::write_slots(slots[i]));
            }
        net.step();
        for (std::uint32_t i : wit.alive) {
            for (auto& e : net.take_inbox(pc_party[i])) {
                try {
                    for (auto& [id, val] : treewire::read_slots(e.payload))
                        if (root_set.count(id)) slots[i].emplace(id, val);
                } catch (const std::exception&) {
                }
            }
        }
    }

    const double accept_thr = (2.0 / 3 + eps / 2) * kappa;
    for (std::uint32_t i : wit.alive) {
        std::map<Bytes, std::uint32_t> tally;
        for (const auto& [id, val] : slots[i])
            if (val.has_value()) ++tally[*val];
        const Bytes* best = nullptr;
        std::uint32_t best_count = 0;
        for (const auto& [bytes, count] : tally)
            if (count > best_count) {
                best = &bytes;
                best_count = count;
            }
        if (best && double(best_count) + 1e-6 >= accept_thr)
            net.submit(pc_party[i], PartyId::user(i), *best);
    }
    net.step();
    std::vector<Bytes> user_pk(n + 1);
    for (std::uint32_t i : wit.alive) {
        PartyId ui = PartyId::user(i);
        if (net.is_aborted(ui)) continue;
        for (auto& e : net.take_inbox(ui))
            if (!(e.src == srv) && !e.payload.empty()) {
                user_pk[i] = std::move(e.payload);
                out.user_has_pk[i] = true;
            }
    }

    // ---- spawn the tree level by level ----
    std::vector<PartyId> node_party(n + 1, PartyId(0));
    node_party[0] = c0_party;
    out.committee_active[0] = true;
    std::vector<bool> got_nonce_reply(n + 1, false);
    const Bytes sk_bytes = kp.sk.serialize();

    std::vector<std::vector<std::uint32_t>> levels;
    for (std::uint32_t lo = 0; lo <= n;) {
        std::uint32_t hi = std::min<std::uint32_t>(n, 2 * lo);
        if (lo == 0) hi = 0;
        std::vector<std::uint32_t> level;
        for (std::uint32_t j = lo; j <= hi; ++j) level.push_back(j);
        levels.push_back(level);
        if (hi == n) break;
        lo = hi + 1;
    }

    for (std::size_t L = 0; L + 1 < levels.size(); ++L) {
        bool any = false;
        for (std::uint32_t j : levels[L]) {
            if (!out.committee_active[j]) continue;
            for (std::uint32_t b = 1; b <= 2; ++b) {
                std::uint32_t child = 2 * j + b;
                if (child > n) continue;
                Rng crng = rng.fork("tree-child", child);
                std::vector<std::uint32_t> members = crng.sample_distinct(kappa, n);
                for (auto& m : members) ++m;
                std::sort(members.begin(), members.end());
                out.tree.committees[child] = members;
                node_party[child] = net.add_virtual(members);
                Writer w;
                w.u32(j);
                w.blob(sk_bytes);
                net.submit(node_party[j], node_party[child], w.take());
                any = true;
            }
        }
        if (!any) continue;
        net.step();
        for (std::uint32_t j : levels[L + 1]) {
            if (node_party[j] == PartyId(0)) continue;
            std::uint32_t parent = (j - 1) / 2;
            for (auto& e : net.take_inbox(node_party[j])) {
                if (!(e.src == node_party[parent])) continue;
                try {
                    Reader r(e.payload);
                    std::uint32_t claimed = r.u32();
                    Bytes got_sk = r.blob();
                    Reader sr(got_sk);
                    Bytes seed = sr.fixed(32);
                    if (claimed == parent && std::equal(seed.begin(), seed.end(),
                                                        kp.sk.seed.begin()))
                        out.committee_active[j] = true;
                } catch (const std::exception&) {
                }
            }
        }

        // Activated children challenge their users with a signed nonce.
        for (std::uint32_t j : levels[L + 1]) {
            if (!out.committee_active[j]) continue;
            Bytes nonce = rng.fork("tree-nonce", j).bytes((kappa + 7) / 8);
            Signature sig = sig_sign_leaf(kp.sk, nonce, j);
            Writer w;
            w.u32(j);
            w.blob(nonce);
            write_signature(w, sig);
            if (!net.is_aborted(PartyId::user(j)))
                net.submit(node_party[j], PartyId::user(j), w.take());
        }
        net.step();
        for (std::uint32_t j : levels[L + 1]) {
            PartyId uj = PartyId::user(j);
            auto in = net.take_inbox(uj);
            if (!out.committee_active[j] || net.is_aborted(uj)) continue;
            bool verified = false;
            for (auto& e : in) {
                if (!(e.src == node_party[j]) || !out.user_has_pk[j]) continue;
                try {
                    Reader r(e.payload);
                    if (r.u32() != j) continue;
                    Bytes nonce = r.blob();
                    Signature sig = read_signature(r);
                    SigPublicKey pk = SigPublicKey::deserialize(user_pk[j]);
                    if (sig_verify(pk, nonce, sig)) verified = true;
                } catch (const std::exception&) {
                }
            }
            out.user_accepted[j] = verified;
            if (verified && !user_silent(j, "tree-alive"))
                net.submit(uj, node_party[j], user_bytes(j, "tree-alive", Bytes{1}));
        }
        net.step();
        for (std::uint32_t j : levels[L + 1]) {
            if (!out.committee_active[j]) continue;
            for (auto& e : net.take_inbox(node_party[j]))
                if (e.src == PartyId::user(j) && !e.payload.empty()) got_nonce_reply[j] = true;
        }
    }

    // ---- aggregate alive totals bottom-up, one relay round per level ----
    // A committee goes silent (no total) if any spawned child's total never
    // arrived, whether the child starved earlier or the server blocked the
    // relay just now; the gap then climbs all the way to the root.
    std::vector<std::optional<std::uint64_t>> subtree(n + 1);
    std::vector<std::map<std::uint32_t, std::uint64_t>> arrived(n + 1);
    for (std::size_t L = levels.size(); L-- > 0;) {
        for (std::uint32_t j : levels[L]) {
            if (!out.committee_active[j]) continue;
            std::uint64_t total = got_nonce_reply[j] ? 1 : 0;
            bool intact = true;
            for (std::uint32_t b = 1; b <= 2; ++b) {
                std::uint32_t child = 2 * j + b;
                if (child > n) continue;
                auto it = arrived[j].find(child);
                if (it != arrived[j].end())
                    total += it->second;
                else
                    intact = false;
            }
            if (intact) subtree[j] = total;
        }
        if (L == 0) break;
        bool sent = false;
        for (std::uint32_t j : levels[L]) {
            if (!subtree[j].has_value()) continue;
            std::uint32_t parent = (j - 1) / 2;
            if (!out.committee_active[parent]) continue;
            Writer w;
            w.u32(j);
            w.u32(std::uint32_t(*subtree[j]));
            net.submit(node_party[j], node_party[parent], w.take());
            sent = true;
        }
        if (sent) net.step();
        for (std::uint32_t p : levels[L - 1]) {
            if (!out.committee_active[p]) continue;
            for (auto& e : net.take_inbox(node_party[p])) {
                try {
                    Reader r(e.payload);
                    std::uint32_t child = r.u32();
                    std::uint32_t total = r.u32();
                    if (child <= n && (child - 1) / 2 == p && e.src == node_party[child])
                        arrived[p][child] = total;
                } catch (const std::exception&) {
                }
            }
        }
    }

    out.root_abort = !subtree[0].has_value();
    out.alive_total = subtree[0] ? std::uint32_t(*subtree[0]) : 0;
    const double floor = (1 - cfg.alpha - eps / 2) * n;
    out.floor_abort = !out.root_abort && double(out.alive_total) + 1e-6 < floor;

    if (out.root_abort || out.floor_abort) {
        for (std::uint32_t i = 1; i <= n; ++i)
            if (!net.is_aborted(PartyId::user(i))) out.user_halted[i] = true;
        return out;
    }
    for (std::uint32_t i = 1; i <= n; ++i) {
        if (net.is_aborted(PartyId::user(i))) continue;
        if (!out.user_accepted[i]) out.user_halted[i] = true;
    }
    out.tree.pk = pk_bytes;
    out.produced = true;
    return out;
}

// Reference tree sampler: the distribution many_committees realizes when
// nobody interferes. Used for distributional checks that don't need the
// network machinery.
inline CommitteeTree ideal_many_committees(std::uint32_t n, std::uint32_t kappa,
                                           const std::vector<std::uint32_t>& c0, Rng& rng) {
    CommitteeTree tree;
    tree.committees.assign(n + 1, {});
    tree.committees[0] = c0;
    for (std::uint32_t j = 1; j <= n; ++j) {
        Rng crng = rng.fork("tree-child", j);
        std::vector<std::uint32_t> members = crng.sample_distinct(kappa, n);
        for (auto& m : members) ++m;
        std::sort(members.begin(), members.end());
        tree.committees[j] = members;
    }
    return tree;
}

} // namespace gmpc
