#pragma once

// Electing one kappa-sized committee from the live committees.
//
// Two phases, each ending in flood_rounds(n,k) alive iterations so that a
// single inconsistency anywhere becomes a global halt. First everyone
// agrees on the number of live users (server announces, neighbors
// compare). Then each committee draws a bin out of ceil(n'/kappa) at
// random and reports it; the server announces the least-occupied bin and
// the set of committees that chose it, and every committee verifies the
// set is small enough, that its own membership matches its draw, and that
// all neighbors were told the same thing. Any violation floods bottom
// through the graph: the violator tells its neighbors, silence does the
// rest, one hop per iteration.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gmpc/committees/setup.hpp"

namespace gmpc {

struct ElectionOutcome {
    static constexpr std::uint32_t never = 0xffffffffu;

    std::vector<std::uint32_t> participants;           // owners entering the election
    std::vector<std::optional<ElectionResult>> output; // per owner; nullopt = halted
    std::vector<std::string> halt_stage;               // empty = survived
    // For halts during the second batch of alive iterations: the iteration
    // index (1-based). 0 for earlier halts, `never` for survivors.
    std::vector<std::uint32_t> halt_iteration;
    ElectionResult honest; // what the tally says before any substitution
    bool unanimous = false;
};

inline ElectionOutcome elect_committee(Net& net, const PcsgWitness& wit,
                                       const std::vector<PartyId>& pc_party, Rng& rng) {
    const std::uint32_t n = wit.n;
    const std::uint32_t kappa = wit.kappa;
    const std::uint32_t iters = wit.flood_iterations;
    const AdversarySpec& adv = net.adversary();
    Strategy& strat = adv.strat();
    const PartyId srv = PartyId::server();

    ElectionOutcome out;
    out.participants = wit.alive;
    out.output.resize(n + 1);
    out.halt_stage.assign(n + 1, "");
    out.halt_iteration.assign(n + 1, ElectionOutcome::never);

    std::vector<bool> live(n + 1, false);
    std::map<PartyId, std::uint32_t> owner_of;
    for (std::uint32_t i : out.participants) {
        live[i] = true;
        owner_of[pc_party[i]] = i;
    }
    auto kill = [&](std::uint32_t i, const char* stage, std::uint32_t iter) {
        if (!live[i]) return;
        live[i] = false;
        out.halt_stage[i] = stage;
        out.halt_iteration[i] = iter;
    };
    // Neighbor lists can still name committees that fell in the last setup
    // iteration; they get no mailbox here, but their silence still counts.
    auto send_nb = [&](std::uint32_t i, std::uint32_t j, Bytes b) {
        if (!(pc_party[j] == PartyId(0))) net.submit(pc_party[i], pc_party[j], std::move(b));
    };
    if (out.participants.empty()) return out;

    // ---- phase one: agree on the number of live users ----
    const std::uint32_t n_alive = std::uint32_t(out.participants.size());
    for (std::uint32_t i : out.participants) {
        std::uint32_t val = n_alive;
        if (adv.server_corrupted)
            if (auto sub = strat.alive_count(i, n_alive)) val = *sub;
        Writer w;
        w.u32(val);
        net.submit(srv, pc_party[i], w.take());
    }
    net.step();
    std::vector<std::uint32_t> n_heard(n + 1, 0);
    for (std::uint32_t i : out.participants) {
        auto in = net.take_inbox(pc_party[i]);
        bool got = false;
        for (auto& e : in) {
            if (!(e.src == srv) || e.payload.size() != 4) continue;
            Reader rd(e.payload);
            n_heard[i] = rd.u32();
            got = got || n_heard[i] > 0;
        }
        if (!got) kill(i, "count-missing", 0);
    }
    for (std::uint32_t i : out.participants) {
        if (!live[i]) continue;
        Writer w;
        w.u32(n_heard[i]);
        Bytes relay = w.take();
        for (std::uint32_t j : wit.neighbors[i]) send_nb(i, j, relay);
    }
    net.step();
    for (std::uint32_t i : out.participants) {
        auto in = net.take_inbox(pc_party[i]);
        if (!live[i]) continue;
        std::map<std::uint32_t, std::uint32_t> from;
        for (auto& e : in) {
            auto it = owner_of.find(e.src);
            if (it == owner_of.end() || e.payload.size() != 4) continue;
            Reader rd(e.payload);
            from[it->second] = rd.u32();
        }
        for (std::uint32_t j : wit.neighbors[i]) {
            auto f = from.find(j);
            if (f == from.end() || f->second != n_heard[i]) {
                kill(i, "count-mismatch", 0);
                break;
            }
        }
    }
    for (std::uint32_t t = 1; t <= iters; ++t) {
        for (std::uint32_t i : out.participants) {
            if (!live[i]) continue;
            for (std::uint32_t j : wit.neighbors[i]) send_nb(i, j, Bytes{2});
        }
        net.step();
        std::vector<std::uint32_t> fallen;
        for (std::uint32_t i : out.participants) {
            auto in = net.take_inbox(pc_party[i]);
            if (!live[i]) continue;
            std::set<std::uint32_t> confirmed;
            for (auto& e : in) {
                auto it = owner_of.find(e.src);
                if (it != owner_of.end() && e.payload == Bytes{2}) confirmed.insert(it->second);
            }
            for (std::uint32_t j : wit.neighbors[i])
                if (!confirmed.count(j)) {
                    fallen.push_back(i);
                    break;
                }
        }
        for (std::uint32_t i : fallen) kill(i, "count-alive", 0);
    }

    // ---- phase two: lightest bin ----
    std::vector<std::uint32_t> bin_of(n + 1, 0), bins_of(n + 1, 0);
    for (std::uint32_t i : out.participants) {
        if (!live[i]) continue;
        bins_of[i] = (n_heard[i] + kappa - 1) / kappa;
        if (bins_of[i] == 0) {
            kill(i, "count-invalid", 0);
            continue;
        }
        bin_of[i] = std::uint32_t(rng.fork("elect-bin", i).below(bins_of[i])) + 1;
        Writer w;
        w.u32(bin_of[i]);
        net.submit(pc_party[i], srv, w.take());
    }
    net.step();
    std::map<std::uint32_t, std::uint32_t> reported; // owner -> bin
    for (auto& e : net.take_inbox(srv)) {
        auto it = owner_of.find(e.src);
        if (it == owner_of.end() || e.payload.size() != 4) continue;
        Reader rd(e.payload);
        reported[it->second] = rd.u32();
    }
    {
        const std::uint32_t b = (n_alive + kappa - 1) / kappa;
        std::vector<std::uint32_t> tally(b + 1, 0);
        for (auto& [i, x] : reported)
            if (x >= 1 && x <= b) ++tally[x];
        std::uint32_t best = 1;
        for (std::uint32_t x = 2; x <= b; ++x)
            if (tally[x] < tally[best]) best = x;
        out.honest.bin = best;
        out.honest.bins = b;
        for (auto& [i, x] : reported)
            if (x == best) out.honest.committee.push_back(i);
    }
    for (auto& [i, x] : reported) {
        (void)x;
        std::uint32_t bin = out.honest.bin;
        std::vector<std::uint32_t> comm = out.honest.committee;
        if (adv.server_corrupted)
            if (auto sub = strat.election_result(i, bin, comm)) {
                bin = sub->first;
                comm = std::move(sub->second);
            }
        Writer w;
        w.u32(bin);
        w.u32(std::uint32_t(comm.size()));
        for (std::uint32_t c : comm) w.u32(c);
        net.submit(srv, pc_party[i], w.take());
    }
    net.step();
    std::vector<std::optional<std::pair<std::uint32_t, std::vector<std::uint32_t>>>> told(n + 1);
    for (std::uint32_t i : out.participants) {
        auto in = net.take_inbox(pc_party[i]);
        if (!live[i]) continue;
        for (auto& e : in) {
            if (!(e.src == srv)) continue;
            try {
                Reader rd(e.payload);
                std::uint32_t bin = rd.u32();
                std::uint32_t cnt = rd.u32();
                if (cnt > rd.remaining() / 4) continue;
                std::vector<std::uint32_t> comm(cnt);
                for (auto& c : comm) c = rd.u32();
                if (!rd.done()) continue;
                std::sort(comm.begin(), comm.end());
                told[i] = {{bin, std::move(comm)}};
            } catch (const std::exception&) {
            }
        }
        if (!told[i]) kill(i, "result-missing", 0);
    }
    for (std::uint32_t i : out.participants) {
        if (!live[i]) continue;
        Writer w;
        w.u32(told[i]->first);
        w.u32(std::uint32_t(told[i]->second.size()));
        for (std::uint32_t c : told[i]->second) w.u32(c);
        Bytes relay = w.take();
        for (std::uint32_t j : wit.neighbors[i]) send_nb(i, j, relay);
    }
    net.step();
    // A committee that spots trouble tells its neighbors before halting;
    // `pending` holds those one-shot notices for the next round.
    std::vector<bool> pending(n + 1, false);
    for (std::uint32_t i : out.participants) {
        auto in = net.take_inbox(pc_party[i]);
        if (!live[i]) continue;
        std::map<std::uint32_t, Bytes> relays;
        for (auto& e : in) {
            auto it = owner_of.find(e.src);
            if (it != owner_of.end()) relays[it->second] = std::move(e.payload);
        }
        Writer w;
        w.u32(told[i]->first);
        w.u32(std::uint32_t(told[i]->second.size()));
        for (std::uint32_t c : told[i]->second) w.u32(c);
        const Bytes own = w.take();

        bool bad = false;
        for (std::uint32_t j : wit.neighbors[i]) {
            auto f = relays.find(j);
            if (f == relays.end() || f->second != own) bad = true;
        }
        const auto& [bin, comm] = *told[i];
        if (comm.size() > kappa) bad = true;
        bool member = std::binary_search(comm.begin(), comm.end(), i);
        if ((bin_of[i] == bin) != member) bad = true;
        if (bad) {
            pending[i] = true;
            kill(i, "result-check", 0);
        }
    }
    for (std::uint32_t t = 1; t <= iters; ++t) {
        for (std::uint32_t i : out.participants) {
            if (live[i]) {
                for (std::uint32_t j : wit.neighbors[i]) send_nb(i, j, Bytes{2});
            } else if (pending[i]) {
                for (std::uint32_t j : wit.neighbors[i]) send_nb(i, j, Bytes{3});
                pending[i] = false;
            }
        }
        net.step();
        std::vector<std::uint32_t> fallen;
        for (std::uint32_t i : out.participants) {
            auto in = net.take_inbox(pc_party[i]);
            if (!live[i]) continue;
            std::set<std::uint32_t> confirmed;
            bool saw_bot = false;
            for (auto& e : in) {
                auto it = owner_of.find(e.src);
                if (it == owner_of.end()) continue;
                if (e.payload == Bytes{2}) confirmed.insert(it->second);
                if (e.payload == Bytes{3}) saw_bot = true;
            }
            for (std::uint32_t j : wit.neighbors[i])
                if (!confirmed.count(j)) saw_bot = true;
            if (saw_bot) fallen.push_back(i);
        }
        for (std::uint32_t i : fallen) {
            pending[i] = true;
            kill(i, "result-alive", t);
        }
    }

    // ---- outputs ----
    bool first = true;
    out.unanimous = true;
    ElectionResult ref;
    for (std::uint32_t i : out.participants) {
        if (!live[i]) {
            out.unanimous = false;
            continue;
        }
        ElectionResult r;
        r.bin = told[i]->first;
        r.committee = told[i]->second;
        r.bins = bins_of[i];
        out.output[i] = r;
        if (first) {
            ref = r;
            first = false;
        } else if (r.committee != ref.committee || r.bin != ref.bin) {
            out.unanimous = false;
        }
    }
    if (first) out.unanimous = false; // nobody finished
    return out;
}

// Convenience entry for witness-only callers: allocates one virtual party
// per live committee on the given network.
inline ElectionOutcome elect_committee(Net& net, const PcsgWitness& wit, Rng& rng) {
    std::vector<PartyId> pc_party(wit.n + 1, PartyId(0));
    for (std::uint32_t i : wit.alive) pc_party[i] = net.add_virtual(wit.pc[i].members);
    return elect_committee(net, wit, pc_party, rng);
}

} // namespace gmpc
