#pragma once

// Graph setup over the live committees. After committee sampling, each
// live committee (acting as one logical party) samples kappa peer
// committees, the server decommits the sampled rows to the committee's
// members, neighbor sets are symmetrized through notifications, the
// committees exchange their rosters, and everyone runs flood_rounds(n,k)
// alive iterations. A committee that misses anything it expects — a
// decommitment, a roster, or a single alive message — halts, and its
// silence spreads one hop per iteration, so one failure anywhere becomes
// globally visible within the iteration budget. The result is a witness
// recording who survived, the agreed neighbor sets, and the measured
// graph diameter, plus a mechanical checker for the conjuncts the rest
// of the stack assumes.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "gmpc/committees/graph.hpp"
#include "gmpc/committees/personal.hpp"

namespace gmpc {

struct SetupOutcome {
    PcRunOutcome pc_run;
    PcsgWitness witness;
    // Mortality record: survived, or the alive-iteration index at which the
    // committee halted (0 = before the iterations started).
    static constexpr std::uint32_t survived = 0xffffffffu;
    std::vector<std::uint32_t> death_iteration;
};

// Evaluate the post-setup conjuncts against a witness: enough alive users
// (all honest ones when the server is honest, the (5/6 - alpha)n floor
// when it is not), full-size committees with honest majority beyond 5/6,
// bounded neighbor sets, the two knowledge bits, and graph diameter within
// the iteration budget (restricted to honest survivors under a corrupted
// server).
inline PcsgReport pcsg_check(const PcsgWitness& wit, const AdversarySpec& adv) {
    PcsgReport rep;
    auto honest_user = [&](std::uint32_t u) { return !adv.corrupted_users.count(u); };
    const bool hon_server = !adv.server_corrupted;

    if (hon_server) {
        bool ok = true;
        for (std::uint32_t u = 1; u <= wit.n; ++u)
            if (honest_user(u) && (!wit.is_alive(u) || !wit.pc[u].active)) ok = false;
        if (!ok) rep.violated.push_back("alive-honest");
    } else {
        std::size_t honest_alive = 0;
        for (std::uint32_t u : wit.alive)
            if (honest_user(u) && wit.pc[u].active) ++honest_alive;
        if (double(honest_alive) + 1e-6 < (5.0 / 6 - wit.alpha) * wit.n)
            rep.violated.push_back("alive-floor");
    }

    bool size_ok = true, deg_ok = true, honesty_ok = true, nb_ok = true, mb_ok = true;
    for (std::uint32_t i : wit.alive) {
        if (wit.pc[i].members.size() != wit.kappa) size_ok = false;
        if (wit.neighbors[i].size() > 4 * std::size_t(wit.kappa)) deg_ok = false;
        if (hon_server || honest_user(i)) {
            std::size_t honest_members = 0;
            for (std::uint32_t m : wit.pc[i].members)
                if (honest_user(m)) ++honest_members;
            if (honest_members * 6 <= 5 * std::size_t(wit.kappa)) honesty_ok = false;
        }
        if (!wit.neighbor_holds[i]) nb_ok = false;
        if (!wit.members_hold[i]) mb_ok = false;
    }
    if (!size_ok) rep.violated.push_back("pc-size");
    if (!deg_ok) rep.violated.push_back("degree");
    if (!honesty_ok) rep.violated.push_back("pc-honesty");
    if (!nb_ok) rep.violated.push_back("neighbor-holds");
    if (!mb_ok) rep.violated.push_back("members-hold");

    std::vector<std::uint32_t> verts;
    for (std::uint32_t i : wit.alive)
        if (hon_server || honest_user(i)) verts.push_back(i);
    if (!verts.empty()) {
        OutGraph g;
        g.n = wit.n;
        g.out.assign(wit.n + 1, {});
        for (std::uint32_t i : verts) g.out[i] = wit.neighbors[i];
        auto d = induced_diameter(g, verts);
        if (!d.has_value() || *d > wit.flood_iterations) rep.violated.push_back("diameter");
    }

    rep.holds = rep.violated.empty();
    return rep;
}

inline SetupOutcome setup_run(Net& net, Rng& rng) {
    const SimConfig& cfg = net.config();
    const std::uint32_t n = cfg.n;
    const std::uint32_t kappa = cfg.kappa;
    const double eps = epsilon_slack(cfg.alpha);
    const double live_need = (1 - cfg.alpha - eps / 2) * kappa;
    const AdversarySpec& adv = net.adversary();
    Strategy& strat = adv.strat();
    const PartyId srv = PartyId::server();
    const std::uint32_t iters = flood_rounds(n, kappa);

    SetupOutcome out;
    out.pc_run = run_personal_committee(net, rng);
    PcRunOutcome& pc = out.pc_run;
    out.death_iteration.assign(n + 1, SetupOutcome::survived);

    PcsgWitness& wit = out.witness;
    wit.n = n;
    wit.kappa = kappa;
    wit.alpha = cfg.alpha;
    wit.flood_iterations = iters;
    wit.pc = pc.pc;
    wit.neighbors.assign(n + 1, {});
    wit.neighbor_holds.assign(n + 1, false);
    wit.members_hold.assign(n + 1, false);

    const std::vector<std::uint32_t> stage1 = pc.alive;
    std::vector<bool> live(n + 1, false);
    for (std::uint32_t i : stage1) live[i] = true;

    auto kill = [&](std::uint32_t i, const char* phase, std::uint32_t iter) {
        if (!live[i]) return;
        live[i] = false;
        out.death_iteration[i] = iter;
        wit.pc[i].active = false;
        if (!pc.user_aborted[i]) {
            pc.user_aborted[i] = true;
            pc.abort_phase[i] = phase;
            net.abort_party(PartyId::user(i));
        }
    };
    auto finalize = [&]() {
        for (std::uint32_t i : stage1)
            if (live[i]) wit.alive.push_back(i);
        wit.user_aborted = pc.user_aborted;
    };

    // Too few live committees to sample distinct peers from; nothing to
    // build a graph with, so everyone halts.
    if (stage1.size() <= kappa) {
        for (std::uint32_t i : stage1) kill(i, "graph-size", 0);
        finalize();
        return out;
    }

    std::map<PartyId, std::uint32_t> owner_of;
    for (std::uint32_t i : stage1) owner_of[pc.pc_party[i]] = i;

    // ---- sample out-neighbors among the live committees, notify them ----
    std::vector<std::vector<std::uint32_t>> n_out(n + 1);
    for (std::size_t idx = 0; idx < stage1.size(); ++idx) {
        std::uint32_t i = stage1[idx];
        Rng srng = rng.fork("setup-nout", i);
        for (std::uint32_t p :
             sample_peers(srng, kappa, std::uint32_t(stage1.size()), std::uint32_t(idx + 1)))
            n_out[i].push_back(stage1[p - 1]);
        std::sort(n_out[i].begin(), n_out[i].end());
        Writer w;
        w.u32(std::uint32_t(n_out[i].size()));
        for (std::uint32_t j : n_out[i]) w.u32(j);
        net.submit(pc.pc_party[i], srv, w.take());
        for (std::uint32_t j : n_out[i]) net.submit(pc.pc_party[i], pc.pc_party[j], Bytes{1});
    }
    net.step();
    net.take_inbox(srv); // the server re-derives the sample sets it relayed

    std::vector<std::set<std::uint32_t>> n_in(n + 1);
    std::vector<std::vector<std::uint32_t>> total(n + 1);
    for (std::uint32_t i : stage1) {
        for (auto& e : net.take_inbox(pc.pc_party[i])) {
            auto it = owner_of.find(e.src);
            if (it != owner_of.end()) n_in[i].insert(it->second);
        }
        if (n_in[i].size() > 3 * std::size_t(kappa)) {
            kill(i, "graph-in", 0);
            continue;
        }
        std::set<std::uint32_t> u(n_out[i].begin(), n_out[i].end());
        u.insert(n_in[i].begin(), n_in[i].end());
        total[i].assign(u.begin(), u.end());
    }

    // ---- server decommits each committee's sampled rows to its members ----
    for (std::uint32_t i : stage1) {
        if (!live[i]) continue;
        // Live members and the roots they hold; one opening set per root.
        std::map<VcCommitment, pcwire::OpenGroup> groups;
        for (std::uint32_t m : pc.pc[i].members) {
            if (pc.user_aborted[m] || pc.inactive.count(m)) continue;
            const VcCommitment& rt = pc.vc.root_for(m);
            auto& g = groups[rt];
            if (g.openings.empty()) {
                g.root = rt;
                const VcAux& aux = pc.vc.aux_for(m);
                for (std::uint32_t j : n_out[i]) g.openings.push_back(vc_open_one(aux, j - 1));
            }
            g.ids.push_back(m);
        }
        std::vector<pcwire::OpenGroup> gs;
        for (auto& [rt, g] : groups) gs.push_back(std::move(g));
        Writer w;
        pcwire::write_groups(w, gs);
        Bytes bundle = w.take();
        if (adv.server_corrupted)
            if (auto sub = strat.graph_openings(i, bundle)) bundle = std::move(*sub);
        net.submit(srv, pc.pc_party[i], bundle);
    }
    net.step();

    // Per-member verification of the decommitted rows. A member whose
    // checks fail leaves the committee; the committee halts if fewer than
    // (1 - alpha - eps/2)k members remain. Row values the committee acts on
    // are the ones opened under the root most of its live members hold.
    std::vector<std::map<std::uint32_t, std::vector<std::uint32_t>>> row_of(n + 1);
    std::vector<bool> all_members_verified(n + 1, false);
    for (std::uint32_t i : stage1) {
        auto in = net.take_inbox(pc.pc_party[i]);
        if (!live[i]) continue;
        std::vector<pcwire::OpenGroup> gs;
        for (auto& e : in) {
            if (!(e.src == srv)) continue;
            try {
                Reader rd(e.payload);
                gs = pcwire::read_groups(rd);
                if (!rd.done()) gs.clear();
            } catch (const std::exception&) {
                gs.clear();
            }
        }
        std::map<VcCommitment, const pcwire::OpenGroup*> by_root;
        for (auto& g : gs)
            if (!by_root.count(g.root)) by_root[g.root] = &g;

        auto rows_under = [&](const VcCommitment& rt)
            -> std::optional<std::map<std::uint32_t, std::vector<std::uint32_t>>> {
            auto it = by_root.find(rt);
            if (it == by_root.end()) return std::nullopt;
            const auto& ops = it->second->openings;
            if (ops.size() != n_out[i].size()) return std::nullopt;
            std::map<std::uint32_t, std::vector<std::uint32_t>> rows;
            for (std::size_t k = 0; k < ops.size(); ++k) {
                std::uint32_t j = n_out[i][k];
                if (ops[k].index != j - 1) return std::nullopt;
                if (!vc_verify_one(pc.vc.pp, rt, ops[k])) return std::nullopt;
                try {
                    auto [owner, members] = pc_entry_parse(ops[k].value);
                    if (owner != j || members.size() != kappa) return std::nullopt;
                    rows[j] = std::move(members);
                } catch (const std::exception&) {
                    return std::nullopt;
                }
            }
            return rows;
        };

        std::size_t live_members = 0, verified = 0;
        std::map<VcCommitment, std::uint32_t> root_tally;
        // Members that aborted or never fixed a table row cannot verify
        // or hold anything; they are out of the committee's head count.
        auto engaged = [&](std::uint32_t m) {
            return !pc.user_aborted[m] && !pc.inactive.count(m);
        };
        for (std::uint32_t m : pc.pc[i].members) {
            if (!engaged(m)) continue;
            ++live_members;
            ++root_tally[pc.user_root[m]];
        }
        std::map<VcCommitment, bool> root_ok;
        for (auto& [rt, cnt] : root_tally) root_ok[rt] = rows_under(rt).has_value();
        for (std::uint32_t m : pc.pc[i].members)
            if (engaged(m) && root_ok[pc.user_root[m]]) ++verified;
        all_members_verified[i] = verified == live_members && live_members > 0;
        if (double(verified) + 1e-6 < live_need) {
            kill(i, "graph-open", 0);
            continue;
        }
        // Majority root fixes the row values the committee works with.
        VcCommitment canon{};
        std::uint32_t best = 0;
        for (auto& [rt, cnt] : root_tally)
            if (root_ok[rt] && cnt > best) {
                best = cnt;
                canon = rt;
            }
        row_of[i] = *rows_under(canon);
    }

    // ---- roster exchange across every edge ----
    for (std::uint32_t i : stage1) {
        if (!live[i]) continue;
        Bytes roster = pc_entry_bytes(i, pc.pc[i].members);
        for (std::uint32_t j : total[i]) net.submit(pc.pc_party[i], pc.pc_party[j], roster);
    }
    net.step();
    std::vector<std::map<std::uint32_t, std::vector<std::uint32_t>>> heard(n + 1);
    for (std::uint32_t i : stage1) {
        auto in = net.take_inbox(pc.pc_party[i]);
        if (!live[i]) continue;
        for (auto& e : in) {
            auto it = owner_of.find(e.src);
            if (it == owner_of.end()) continue;
            try {
                auto [owner, members] = pc_entry_parse(e.payload);
                if (owner != it->second || members.size() != kappa) continue;
                heard[i][owner] = std::move(members);
            } catch (const std::exception&) {
            }
        }
        bool ok = true;
        for (std::uint32_t j : total[i]) {
            auto hj = heard[i].find(j);
            if (hj == heard[i].end()) ok = false; // neighbor silent or garbled
            else if (row_of[i].count(j) && row_of[i][j] != hj->second)
                ok = false; // roster contradicts the decommitted row
        }
        if (!ok) kill(i, "graph-exchange", 0);
    }

    // ---- alive iterations: silence spreads one hop per round ----
    for (std::uint32_t t = 1; t <= iters; ++t) {
        for (std::uint32_t i : stage1) {
            if (!live[i]) continue;
            for (std::uint32_t j : total[i]) net.submit(pc.pc_party[i], pc.pc_party[j], Bytes{2});
        }
        net.step();
        std::vector<std::uint32_t> fallen;
        for (std::uint32_t i : stage1) {
            auto in = net.take_inbox(pc.pc_party[i]);
            if (!live[i]) continue;
            std::set<std::uint32_t> confirmed;
            for (auto& e : in) {
                auto it = owner_of.find(e.src);
                if (it != owner_of.end()) confirmed.insert(it->second);
            }
            for (std::uint32_t j : total[i])
                if (!confirmed.count(j)) {
                    fallen.push_back(i);
                    break;
                }
        }
        for (std::uint32_t i : fallen) kill(i, "graph-alive", t);
    }

    // ---- witness assembly ----
    for (std::uint32_t i : stage1) {
        if (!live[i]) continue;
        wit.neighbors[i] = total[i];
        bool nb = true;
        for (std::uint32_t j : total[i]) {
            // Neighbor j holds (i, P_i) if it decommitted row i (when it
            // sampled i) or received i's roster (when i sampled it).
            bool holds = false;
            if (row_of[j].count(i) && row_of[j][i] == pc.pc[i].members) holds = true;
            auto hj = heard[j].find(i);
            if (hj != heard[j].end() && hj->second == pc.pc[i].members) holds = true;
            if (!holds) nb = false;
        }
        wit.neighbor_holds[i] = nb;
        bool mb = all_members_verified[i];
        for (std::uint32_t j : total[i])
            if (live[j] && !row_of[i].count(j) && !heard[i].count(j)) mb = false;
        wit.members_hold[i] = mb;
    }
    {
        OutGraph g;
        g.n = n;
        g.out.assign(n + 1, {});
        std::vector<std::uint32_t> verts;
        for (std::uint32_t i : stage1)
            if (live[i]) {
                g.out[i] = n_out[i];
                verts.push_back(i);
            }
        if (!verts.empty()) wit.diameter = induced_diameter(g, verts);
    }
    finalize();
    return out;
}

// The witness an ideal, fully honest setup produces: everyone alive, fresh
// committees and neighbor samples, both knowledge bits set, measured
// diameter. Used to stage later phases without replaying the network.
inline PcsgWitness ideal_setup(std::uint32_t n, std::uint32_t kappa, double alpha, Rng& rng) {
    require(n >= 2 && kappa >= 1 && kappa + 1 <= n, "ideal_setup: bad sizes");
    PcsgWitness wit;
    wit.n = n;
    wit.kappa = kappa;
    wit.alpha = alpha;
    wit.flood_iterations = flood_rounds(n, kappa);
    wit.pc.resize(n + 1);
    wit.user_aborted.assign(n + 1, false);
    wit.neighbors.assign(n + 1, {});
    wit.neighbor_holds.assign(n + 1, true);
    wit.members_hold.assign(n + 1, true);

    OutGraph g;
    g.n = n;
    g.out.assign(n + 1, {});
    std::vector<std::set<std::uint32_t>> nb(n + 1);
    for (std::uint32_t i = 1; i <= n; ++i) {
        wit.alive.push_back(i);
        wit.pc[i].owner = i;
        Rng crng = rng.fork("ideal-pc", i);
        wit.pc[i].members = subset_sample(crng, kappa, n);
        wit.pc[i].active = true;
        Rng nrng = rng.fork("ideal-nb", i);
        g.out[i] = sample_peers(nrng, kappa, n, i);
        for (std::uint32_t j : g.out[i]) {
            nb[i].insert(j);
            nb[j].insert(i);
        }
    }
    for (std::uint32_t i = 1; i <= n; ++i)
        wit.neighbors[i].assign(nb[i].begin(), nb[i].end());
    wit.diameter = induced_diameter(g, wit.alive);
    return wit;
}

} // namespace gmpc
