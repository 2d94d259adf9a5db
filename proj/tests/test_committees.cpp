#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <queue>

#include "gmpc/committees/election.hpp"
#include "gmpc/committees/feige.hpp"
#include "gmpc/committees/graph.hpp"
#include "gmpc/committees/personal.hpp"
#include "gmpc/committees/setup.hpp"
#include "gmpc/committees/subset.hpp"
#include "gmpc/committees/tree.hpp"
#include "gmpc/committees/types.hpp"
#include "gmpc/experiments/stats.hpp"

using namespace gmpc;

namespace {

// Reference diameter: one plain BFS per vertex over the symmetrized
// induced graph. Quadratic, only for cross-checking the batched version.
std::optional<std::uint32_t> naive_diameter(const OutGraph& g,
                                            const std::vector<std::uint32_t>& verts) {
    std::size_t m = verts.size();
    if (m == 0) return std::nullopt;
    std::map<std::uint32_t, std::size_t> id;
    for (std::size_t i = 0; i < m; ++i) id[verts[i]] = i;
    std::vector<std::set<std::size_t>> adj(m);
    for (std::uint32_t v : verts)
        for (std::uint32_t w : g.out[v])
            if (w != v && id.count(w)) {
                adj[id[v]].insert(id[w]);
                adj[id[w]].insert(id[v]);
            }
    std::uint32_t best = 0;
    for (std::size_t s = 0; s < m; ++s) {
        std::vector<std::int64_t> dist(m, -1);
        std::queue<std::size_t> q;
        dist[s] = 0;
        q.push(s);
        while (!q.empty()) {
            std::size_t v = q.front();
            q.pop();
            for (std::size_t w : adj[v])
                if (dist[w] < 0) {
                    dist[w] = dist[v] + 1;
                    q.push(w);
                }
        }
        for (std::size_t v = 0; v < m; ++v) {
            if (dist[v] < 0) return std::nullopt;
            best = std::max(best, std::uint32_t(dist[v]));
        }
    }
    return best;
}

} // namespace

TEST_CASE("subset decoding is deterministic, sized and in range") {
    Rng rng(7);
    for (int t = 0; t < 50; ++t) {
        std::uint32_t n = 5 + std::uint32_t(rng.below(60));
        std::uint32_t kappa = 1 + std::uint32_t(rng.below(n < 12 ? n - 1 : 12));
        Bytes material = rng.bytes(subset_string_bytes(kappa, n));
        auto s1 = subset_from_bytes(material, kappa, n);
        auto s2 = subset_from_bytes(material, kappa, n);
        CHECK(s1 == s2);
        REQUIRE(s1.size() == kappa);
        CHECK(std::is_sorted(s1.begin(), s1.end()));
        for (std::size_t i = 0; i + 1 < s1.size(); ++i) CHECK(s1[i] < s1[i + 1]);
        CHECK(s1.front() >= 1);
        CHECK(s1.back() <= n);
    }
}

TEST_CASE("subset decoding matches direct index extraction when indices collide-free") {
    // n = 16: 8 bits per index, little-endian within the string, mod 16.
    Bytes material = {0x01, 0x02, 0x13, 0x24}; // indices 1, 2, 3, 4 -> users 2, 3, 4, 5
    auto s = subset_from_bytes(material, 4, 16);
    CHECK(s == std::vector<std::uint32_t>({2, 3, 4, 5}));
}

TEST_CASE("subset decoding fills collisions deterministically") {
    // All-zero material decodes every index to user 1; the remaining
    // members come from the expander stream, still deterministic.
    Bytes material(subset_string_bytes(6, 32), 0x00);
    auto s1 = subset_from_bytes(material, 6, 32);
    auto s2 = subset_from_bytes(material, 6, 32);
    REQUIRE(s1.size() == 6);
    CHECK(s1 == s2);
    CHECK(s1.front() == 1);
}

TEST_CASE("coin-toss subsets are near-uniform over all committees (n=8, kappa=2)") {
    // The decode cannot be exactly flat (2^12 strings do not split evenly
    // over C(8,2)=28 pairs), so check two things: the exact distribution,
    // obtained by enumerating every 12-bit string, is within 2% total
    // variation of flat; and a 10^4-trial Monte Carlo of honest coin
    // tosses passes chi-square against flat at p > 0.01.
    const std::uint32_t n = 8, kappa = 2;
    auto key = [](const std::vector<std::uint32_t>& s) { return s[0] * 100 + s[1]; };

    std::map<std::uint32_t, std::uint64_t> exact;
    for (std::uint32_t mat = 0; mat < (1u << 12); ++mat) {
        Bytes material = {std::uint8_t(mat & 0xff), std::uint8_t(mat >> 8)};
        auto sub = subset_from_bytes(material, kappa, n);
        REQUIRE(sub.size() == 2);
        ++exact[key(sub)];
    }
    REQUIRE(exact.size() == 28);
    double tv = 0;
    for (auto& [k, c] : exact) tv += std::fabs(double(c) / 4096.0 - 1.0 / 28.0);
    CHECK(tv / 2 < 0.02);

    const std::uint64_t trials = 10000;
    std::map<std::uint32_t, std::uint64_t> counts;
    Rng rng(42);
    for (std::uint64_t t = 0; t < trials; ++t) {
        Bytes r = rng.bytes(subset_string_bytes(kappa, n));
        Bytes s = rng.bytes(subset_string_bytes(kappa, n));
        auto sub = subset_from_bytes(xor_strings(r, s), kappa, n);
        ++counts[key(sub)];
    }
    CHECK(counts.size() == 28);
    std::vector<std::uint64_t> observed;
    for (auto& [k, v] : counts) observed.push_back(v);
    std::vector<double> expected(28, double(trials) / 28.0);
    double p = chi2_pvalue(chi2_statistic(observed, expected), 27);
    CHECK(p > 0.01);
}

TEST_CASE("fresh subset sampling is uniform too") {
    const std::uint32_t n = 8, kappa = 2;
    const std::uint64_t trials = 28000;
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> counts;
    Rng rng(43);
    for (std::uint64_t t = 0; t < trials; ++t) {
        auto sub = subset_sample(rng, kappa, n);
        ++counts[{sub[0], sub[1]}];
    }
    CHECK(counts.size() == 28);
    std::vector<std::uint64_t> observed;
    for (auto& [k, v] : counts) observed.push_back(v);
    std::vector<double> expected(28, double(trials) / 28.0);
    double p = chi2_pvalue(chi2_statistic(observed, expected), 27);
    CHECK(p > 0.01);
}

TEST_CASE("election failure bound: closed form and shape") {
    // alpha' = alpha collapses the exponential to 1.
    CHECK(feige_err(1000, 50, 0.1, 0.1) == Catch::Approx(1000.0 / 50.0));
    // Independent evaluation of one point.
    double n = 2048, np = 48, a = 0.1, ap = 1.0 / 3.0;
    double want = (n / np) * std::exp(-(ap - a) * (ap - a) * np / (2 * (1 - a)));
    CHECK(feige_err(n, np, a, ap) == Catch::Approx(want));
    // Larger committees fail less often.
    double prev = feige_err(4096, 16, 0.1, 0.25);
    for (double k = 32; k <= 512; k *= 2) {
        double cur = feige_err(4096, k, 0.1, 0.25);
        CHECK(cur < prev);
        prev = cur;
    }
    CHECK_THROWS(feige_err(100, 100, 0.1, 0.2)); // need n' < n
    CHECK_THROWS(feige_err(100, 10, 0.3, 0.2));  // need alpha <= alpha'
}

TEST_CASE("graph sampling degrees: d out-edges for good vertices, none for bad") {
    Rng rng(11);
    std::set<std::uint32_t> bad = {2, 5};
    OutGraph g = graph_sample(rng, 20, 4, bad);
    for (std::uint32_t v = 1; v <= 20; ++v) {
        if (bad.count(v)) {
            CHECK(g.out[v].empty());
            continue;
        }
        REQUIRE(g.out[v].size() == 4);
        CHECK(std::is_sorted(g.out[v].begin(), g.out[v].end()));
        for (std::size_t i = 0; i + 1 < 4; ++i) CHECK(g.out[v][i] < g.out[v][i + 1]);
        CHECK(g.out[v].back() <= 20);
        CHECK(g.out[v].front() >= 1);
    }
    // d = n gives the complete out-list.
    OutGraph full = graph_sample(rng, 6, 6, {});
    for (std::uint32_t v = 1; v <= 6; ++v)
        CHECK(full.out[v] == std::vector<std::uint32_t>({1, 2, 3, 4, 5, 6}));
}

TEST_CASE("sampled in-degrees stay below the 3*kappa acceptance line") {
    const std::uint32_t n = 512, kappa = 16;
    Rng rng(12);
    OutGraph g = graph_sample(rng, n, kappa, {});
    std::vector<std::uint32_t> indeg(n + 1, 0);
    for (std::uint32_t v = 1; v <= n; ++v)
        for (std::uint32_t w : g.out[v]) ++indeg[w];
    std::uint32_t worst = *std::max_element(indeg.begin() + 1, indeg.end());
    CHECK(worst <= 3 * kappa);
}

TEST_CASE("induced diameter: hand-checked shapes") {
    // Star out of vertex 1: symmetrized, leaf-to-leaf distance is 2.
    OutGraph star;
    star.n = 6;
    star.out.resize(7);
    star.out[1] = {2, 3, 4, 5, 6};
    CHECK(induced_diameter(star, {1, 2, 3, 4, 5, 6}) == 2);
    CHECK(induced_diameter(star, {2, 3}) == std::nullopt); // leaves alone: no edges
    CHECK(induced_diameter(star, {1, 4}) == 1);
    CHECK(induced_diameter(star, {4}) == 0);

    // Directed path 1 -> 2 -> ... -> 5 symmetrizes to the 5-path.
    OutGraph path;
    path.n = 5;
    path.out.resize(6);
    for (std::uint32_t v = 1; v <= 4; ++v) path.out[v] = {v + 1};
    CHECK(induced_diameter(path, {1, 2, 3, 4, 5}) == 4);
    CHECK(induced_diameter(path, {1, 2, 3}) == 2);
    CHECK(induced_diameter(path, {1, 2, 4, 5}) == std::nullopt); // bridge removed

    // Self-loops contribute nothing.
    OutGraph loops;
    loops.n = 2;
    loops.out.resize(3);
    loops.out[1] = {1, 2};
    loops.out[2] = {2};
    CHECK(induced_diameter(loops, {1, 2}) == 1);
}

TEST_CASE("induced diameter agrees with per-source BFS on random graphs") {
    Rng rng(99);
    for (int t = 0; t < 40; ++t) {
        std::uint32_t n = 2 + std::uint32_t(rng.below(39));
        std::uint32_t d = 1 + std::uint32_t(rng.below(std::min<std::uint64_t>(3, n)));
        std::set<std::uint32_t> bad;
        for (std::uint32_t v = 1; v <= n; ++v)
            if (rng.below(8) == 0) bad.insert(v);
        OutGraph g = graph_sample(rng, n, d, bad);
        std::vector<std::uint32_t> verts;
        for (std::uint32_t v = 1; v <= n; ++v)
            if (rng.below(5) != 0) verts.push_back(v);
        auto fast = induced_diameter(g, verts);
        auto slow = naive_diameter(g, verts);
        CHECK(fast == slow);
    }
}

TEST_CASE("induced diameter handles more than 64 sources (multi-pass)") {
    Rng rng(100);
    OutGraph g = graph_sample(rng, 200, 3, {});
    std::vector<std::uint32_t> verts;
    for (std::uint32_t v = 1; v <= 200; ++v) verts.push_back(v);
    CHECK(induced_diameter(g, verts) == naive_diameter(g, verts));
}

TEST_CASE("flood iteration count") {
    // ceil(log(n/4) / log(kappa/4)) + 1 at the acceptance parameters.
    CHECK(flood_rounds(4096, 64) == 4);
    CHECK(flood_rounds(2048, 48) == 4);
    CHECK(flood_rounds(16, 8) == 3);
    CHECK(flood_rounds(4, 64) == 1);  // degenerate sizes clamp
    CHECK(flood_rounds(4096, 4) == 1);
}

TEST_CASE("table row codec round-trips and rejects nonsense counts") {
    std::vector<std::uint32_t> members = {3, 9, 14};
    Bytes b = pc_entry_bytes(7, members);
    auto [owner, got] = pc_entry_parse(b);
    CHECK(owner == 7);
    CHECK(got == members);

    Bytes empty_row = pc_entry_bytes(2, {});
    auto [o2, g2] = pc_entry_parse(empty_row);
    CHECK(o2 == 2);
    CHECK(g2.empty());

    Writer w;
    w.u32(1);
    w.u32(1u << 30); // count that cannot fit the buffer
    CHECK_THROWS(pc_entry_parse(w.peek()));
}

TEST_CASE("witness alive lookup and tree parent indexing") {
    PcsgWitness wit;
    wit.alive = {1, 4, 9};
    CHECK(wit.is_alive(4));
    CHECK_FALSE(wit.is_alive(5));

    CHECK_FALSE(CommitteeTree::parent(0).has_value());
    CHECK(CommitteeTree::parent(1) == 0u);
    CHECK(CommitteeTree::parent(2) == 0u);
    CHECK(CommitteeTree::parent(5) == 2u);
    CHECK(CommitteeTree::parent(6) == 2u);
}

// ---------------------------------------------------------------------------
// Committee-sampling runner
// ---------------------------------------------------------------------------

namespace {

PcRunOutcome run_pc(const SimConfig& cfg, const AdversarySpec& adv, std::uint64_t seed = 7) {
    Net net(cfg, adv);
    Rng rng(seed);
    return run_personal_committee(net, rng);
}

// Suppress server -> target traffic in one round.
struct WithholdRound : Strategy {
    std::uint32_t round, target;
    WithholdRound(std::uint32_t r, std::uint32_t t) : round(r), target(t) {}
    std::vector<std::size_t> select_blocks(std::uint32_t r,
                                           const std::vector<MetaRecord>& meta) override {
        std::vector<std::size_t> out;
        if (r != round) return out;
        for (std::size_t i = 0; i < meta.size(); ++i)
            if (meta[i].src.is_server() && meta[i].dst.v == target) out.push_back(i);
        return out;
    }
};

// A corrupted user that garbles one phase's payload.
struct GarblePhase : Strategy {
    std::string phase;
    explicit GarblePhase(std::string p) : phase(std::move(p)) {}
    std::optional<Bytes> user_payload(std::uint32_t, std::string_view ph,
                                      const Bytes& honest) override {
        if (ph != phase) return std::nullopt;
        Bytes b = honest;
        if (b.empty()) b.push_back(0);
        b[0] ^= 0xff;
        return b;
    }
};

// Commit a falsified row for `position` towards every viewer except the
// row's owner, who keeps seeing the honest table.
struct EquivocateRow : Strategy {
    std::uint32_t position;
    explicit EquivocateRow(std::uint32_t p) : position(p) {}
    std::optional<Bytes> pc_table_entry(std::uint32_t viewer, std::uint32_t pos,
                                        const Bytes& entry) override {
        if (pos != position || viewer == position) return std::nullopt;
        Bytes b = entry;
        b.back() ^= 0x01; // tamper with the last member id
        return b;
    }
};

// Block the first `per_user` user->user deliveries into every destination
// in one round (the cross-audit response round when aimed at round 6).
struct ShaveResponses : Strategy {
    std::uint32_t round;
    std::size_t per_user;
    std::uint32_t only_dst; // 0 = every destination
    ShaveResponses(std::uint32_t r, std::size_t k, std::uint32_t d = 0)
        : round(r), per_user(k), only_dst(d) {}
    std::vector<std::size_t> select_blocks(std::uint32_t r,
                                           const std::vector<MetaRecord>& meta) override {
        std::vector<std::size_t> out;
        if (r != round) return out;
        std::map<std::uint32_t, std::size_t> taken;
        for (std::size_t i = 0; i < meta.size(); ++i) {
            if (meta[i].src.is_server() || meta[i].dst.is_server()) continue;
            if (only_dst && meta[i].dst.v != only_dst) continue;
            if (taken[meta[i].dst.v] < per_user) {
                ++taken[meta[i].dst.v];
                out.push_back(i);
            }
        }
        return out;
    }
};

// Cut the server's coin contribution to a fixed prefix of users, removing
// them from the protocol at the very start.
struct BulkCoinBlock : Strategy {
    std::uint32_t cutoff; // block users 1..cutoff
    explicit BulkCoinBlock(std::uint32_t c) : cutoff(c) {}
    std::vector<std::size_t> select_blocks(std::uint32_t r,
                                           const std::vector<MetaRecord>& meta) override {
        std::vector<std::size_t> out;
        if (r != PcRound::coin_out) return out;
        for (std::size_t i = 0; i < meta.size(); ++i)
            if (meta[i].src.is_server() && meta[i].dst.v >= 1 && meta[i].dst.v <= cutoff)
                out.push_back(i);
        return out;
    }
};

} // namespace

TEST_CASE("committee sampling, honest run: everyone alive with correct shared knowledge") {
    SimConfig cfg;
    cfg.n = 64;
    cfg.kappa = 8;
    cfg.alpha = 0.1;
    AdversarySpec adv;
    Net net(cfg, adv);
    Rng rng(11);
    PcRunOutcome out = run_personal_committee(net, rng);

    CHECK(out.alive.size() == cfg.n);
    CHECK(out.inactive.empty());
    for (std::uint32_t i = 1; i <= cfg.n; ++i) {
        CHECK_FALSE(out.user_aborted[i]);
        CHECK(out.pc[i].active);
        CHECK(out.pc[i].members.size() == cfg.kappa);
        CHECK(out.user_root[i] == out.vc.root);
        CHECK(out.pc_party[i].v != 0);
        CHECK(net.members(out.pc_party[i]) == out.pc[i].members);
        // Committed table row matches the fixed committee.
        CHECK(out.table[i] == pc_entry_bytes(i, out.pc[i].members));
    }

    // Membership knowledge: user j holds (i, P_i) exactly when j sits in P_i.
    std::vector<std::vector<std::pair<std::uint32_t, std::vector<std::uint32_t>>>> expect(cfg.n + 1);
    for (std::uint32_t i = 1; i <= cfg.n; ++i)
        for (std::uint32_t j : out.pc[i].members) expect[j].push_back({i, out.pc[i].members});
    for (std::uint32_t j = 1; j <= cfg.n; ++j) {
        std::sort(expect[j].begin(), expect[j].end());
        CHECK(out.memberships[j] == expect[j]);
    }

    // Total committee seats are n * kappa, so mean load is kappa.
    std::size_t seats = 0;
    for (std::uint32_t j = 1; j <= cfg.n; ++j) seats += expect[j].size();
    CHECK(seats == std::size_t(cfg.n) * cfg.kappa);
}

TEST_CASE("committee sampling is a pure function of the seed") {
    SimConfig cfg;
    cfg.n = 32;
    cfg.kappa = 5;
    cfg.alpha = 0.1;
    AdversarySpec adv;
    PcRunOutcome a = run_pc(cfg, adv, 99);
    PcRunOutcome b = run_pc(cfg, adv, 99);
    PcRunOutcome c = run_pc(cfg, adv, 100);

    CHECK(a.alive == b.alive);
    CHECK(a.table == b.table);
    CHECK(a.user_root == b.user_root);
    bool same = true;
    for (std::uint32_t i = 1; i <= cfg.n; ++i)
        if (a.pc[i].members != c.pc[i].members) same = false;
    CHECK_FALSE(same); // a different seed moves the committees
}

TEST_CASE("withholding the server coin share aborts exactly that user") {
    SimConfig cfg;
    cfg.n = 48;
    cfg.kappa = 8;
    cfg.alpha = 0.1;
    WithholdRound strat(PcRound::coin_out, 17);
    AdversarySpec adv;
    adv.server_corrupted = true;
    adv.strategy = &strat;
    PcRunOutcome out = run_pc(cfg, adv);

    CHECK(out.user_aborted[17]);
    CHECK(out.abort_phase[17] == "coin");
    CHECK(out.inactive.count(17) == 1); // no decommit ever reaches the server
    CHECK(out.alive.size() == cfg.n - 1);
    for (std::uint32_t i = 1; i <= cfg.n; ++i)
        if (i != 17) CHECK_FALSE(out.user_aborted[i]);
}

TEST_CASE("a garbled decommitment makes the server label the user inactive") {
    SimConfig cfg;
    cfg.n = 48;
    cfg.kappa = 8;
    cfg.alpha = 0.1;
    GarblePhase strat("pc-decommit");
    AdversarySpec adv;
    adv.corrupted_users = {30};
    adv.strategy = &strat;
    PcRunOutcome out = run_pc(cfg, adv);

    CHECK(out.inactive == std::set<std::uint32_t>{30});
    CHECK(out.pc[30].members.empty());
    CHECK(out.user_aborted[30]); // never receives a usable table opening
    CHECK(out.abort_phase[30] == "table-self");
    CHECK(out.alive.size() == cfg.n - 1);
    CHECK_FALSE(std::binary_search(out.alive.begin(), out.alive.end(), 30u));
}

TEST_CASE("equivocating on one table row is caught by that row's owner") {
    SimConfig cfg;
    cfg.n = 64;
    cfg.kappa = 8;
    cfg.alpha = 0.1;
    const std::uint32_t victim = 23;
    EquivocateRow strat(victim);
    AdversarySpec adv;
    adv.server_corrupted = true;
    adv.strategy = &strat;
    PcRunOutcome out = run_pc(cfg, adv, 5);

    // The victim's own opening matches its coin toss, but every sampled
    // peer reports the falsified tree's root: zero consistent answers.
    CHECK(out.user_aborted[victim]);
    CHECK(out.abort_phase[victim] == "crosscheck");

    // Collateral damage: a user whose query audit touched both the
    // victim's row and the victim's tree aborts too, and each abort can
    // cascade into the liveness phases of users who sampled the departed.
    std::size_t collateral = 0;
    for (std::uint32_t i = 1; i <= cfg.n; ++i) {
        if (i == victim || !out.user_aborted[i]) continue;
        CHECK((out.abort_phase[i] == "query" || out.abort_phase[i] == "pc-vote" ||
               out.abort_phase[i] == "ping"));
        ++collateral;
    }
    CHECK(collateral <= cfg.n / 8);
    CHECK(out.alive.size() >= cfg.n - 1 - cfg.n / 8);
}

TEST_CASE("response blocking at the tolerated bound leaves every user alive") {
    SimConfig cfg;
    cfg.n = 64;
    cfg.kappa = 16;
    cfg.alpha = 0.1;
    const double eps = epsilon_slack(cfg.alpha);
    const double need = (1 - 2 * cfg.alpha - eps / 2) * cfg.kappa;
    const std::size_t tolerated = cfg.kappa - std::size_t(std::ceil(need - 1e-6));

    ShaveResponses strat(PcRound::sample_respond, tolerated);
    AdversarySpec adv;
    adv.server_corrupted = true;
    adv.strategy = &strat;
    PcRunOutcome out = run_pc(cfg, adv);

    CHECK(out.alive.size() == cfg.n); // nobody dips below the audit threshold
}

TEST_CASE("one response past the tolerated bound kills the audited user") {
    SimConfig cfg;
    cfg.n = 64;
    cfg.kappa = 16;
    cfg.alpha = 0.1;
    const double eps = epsilon_slack(cfg.alpha);
    const double need = (1 - 2 * cfg.alpha - eps / 2) * cfg.kappa;
    const std::size_t tolerated = cfg.kappa - std::size_t(std::ceil(need - 1e-6));
    const std::uint32_t target = 40;

    ShaveResponses strat(PcRound::sample_respond, tolerated + 1, target);
    AdversarySpec adv;
    adv.server_corrupted = true;
    adv.strategy = &strat;
    PcRunOutcome out = run_pc(cfg, adv);

    CHECK(out.user_aborted[target]);
    CHECK(out.abort_phase[target] == "crosscheck");
    CHECK(out.alive.size() == cfg.n - 1);
}

TEST_CASE("bulk removal early in the run collapses the survivors' audits") {
    SimConfig cfg;
    cfg.n = 256;
    cfg.kappa = 32;
    cfg.alpha = 0.1;
    const std::uint32_t cut = std::uint32_t(0.6 * cfg.n);
    BulkCoinBlock strat(cut);
    AdversarySpec adv;
    adv.server_corrupted = true;
    adv.strategy = &strat;
    PcRunOutcome out = run_pc(cfg, adv, 3);

    for (std::uint32_t i = 1; i <= cut; ++i) {
        CHECK(out.user_aborted[i]);
        CHECK(out.abort_phase[i] == "coin");
    }
    // Every survivor samples mostly-gone peers and falls far below the
    // audit threshold, so removal at this scale cannot go unnoticed.
    CHECK(out.alive.empty());
    for (std::uint32_t i = cut + 1; i <= cfg.n; ++i) CHECK(out.user_aborted[i]);
}

// ---------------------------------------------------------------------------
// Graph setup and the post-setup conjunct checker
// ---------------------------------------------------------------------------

namespace {

// Corrupt the decommitment bundle one committee's members receive.
struct TamperOpenings : Strategy {
    std::uint32_t victim;
    explicit TamperOpenings(std::uint32_t v) : victim(v) {}
    std::optional<Bytes> graph_openings(std::uint32_t pc_owner, const Bytes& honest) override {
        if (pc_owner != victim) return std::nullopt;
        Bytes b = honest;
        b[b.size() / 2] ^= 0x40;
        return b;
    }
};

// Fully silent corrupted user: participates in nothing.
struct Mute : Strategy {
    bool user_silent(std::uint32_t, std::string_view) override { return true; }
};

} // namespace

TEST_CASE("honest graph setup: full survival and all conjuncts hold") {
    SimConfig cfg;
    cfg.n = 64;
    cfg.kappa = 8;
    cfg.alpha = 0.1;
    AdversarySpec adv;
    Net net(cfg, adv);
    Rng rng(21);
    SetupOutcome out = setup_run(net, rng);

    CHECK(out.witness.alive.size() == cfg.n);
    for (std::uint32_t i = 1; i <= cfg.n; ++i) {
        CHECK(out.death_iteration[i] == SetupOutcome::survived);
        CHECK(out.witness.pc[i].active);
        CHECK(out.witness.neighbors[i].size() >= cfg.kappa);
        CHECK(out.witness.neighbors[i].size() <= 4 * std::size_t(cfg.kappa));
        CHECK(out.witness.neighbor_holds[i]);
        CHECK(out.witness.members_hold[i]);
        // Symmetry: i appears in each of its neighbors' sets.
        for (std::uint32_t j : out.witness.neighbors[i]) {
            const auto& nj = out.witness.neighbors[j];
            CHECK(std::binary_search(nj.begin(), nj.end(), i));
        }
    }
    REQUIRE(out.witness.diameter.has_value());
    CHECK(*out.witness.diameter <= out.witness.flood_iterations);

    PcsgReport rep = pcsg_check(out.witness, adv);
    CHECK(rep.holds);
    CHECK(rep.violated.empty());
}

TEST_CASE("one silent corrupted user cannot shake out any honest user") {
    SimConfig cfg;
    cfg.n = 64;
    cfg.kappa = 32;
    cfg.alpha = 0.02;
    Mute strat;
    AdversarySpec adv;
    adv.corrupted_users = {13};
    adv.strategy = &strat;
    Net net(cfg, adv);
    Rng rng(8);
    SetupOutcome out = setup_run(net, rng);

    CHECK_FALSE(out.witness.is_alive(13));
    for (std::uint32_t i = 1; i <= cfg.n; ++i)
        if (i != 13) CHECK(out.witness.is_alive(i));
    PcsgReport rep = pcsg_check(out.witness, adv);
    CHECK(rep.holds);
}

TEST_CASE("a falsified decommitment bundle cascades to every committee") {
    SimConfig cfg;
    cfg.n = 64;
    cfg.kappa = 8;
    cfg.alpha = 0.1;
    const std::uint32_t victim = 9;
    TamperOpenings strat(victim);
    AdversarySpec adv;
    adv.server_corrupted = true;
    adv.strategy = &strat;
    Net net(cfg, adv);
    Rng rng(31);
    SetupOutcome out = setup_run(net, rng);

    // The victim's members reject the bundle outright; its silence then
    // spreads one hop per alive iteration until nobody is left.
    CHECK(out.pc_run.abort_phase[victim] == "graph-open");
    CHECK(out.death_iteration[victim] == 0);
    CHECK(out.witness.alive.empty());
    for (std::uint32_t i = 1; i <= cfg.n; ++i) {
        CHECK(out.pc_run.user_aborted[i]);
        CHECK(out.death_iteration[i] <= out.witness.flood_iterations);
    }
}

TEST_CASE("ideal witness passes the checker; planted defects are named") {
    Rng rng(77);
    PcsgWitness wit = ideal_setup(128, 12, 0.1, rng);
    AdversarySpec adv;
    CHECK(pcsg_check(wit, adv).holds);

    SECTION("undersized committee") {
        wit.pc[5].members.pop_back();
        PcsgReport rep = pcsg_check(wit, adv);
        CHECK_FALSE(rep.holds);
        CHECK(std::count(rep.violated.begin(), rep.violated.end(), "pc-size") == 1);
    }
    SECTION("oversized neighbor set") {
        wit.neighbors[7].resize(4 * 12 + 1, 1);
        PcsgReport rep = pcsg_check(wit, adv);
        CHECK_FALSE(rep.holds);
        CHECK(std::count(rep.violated.begin(), rep.violated.end(), "degree") == 1);
    }
    SECTION("honest membership exactly at the five-sixths boundary fails") {
        // kappa = 12: exactly 10 honest members is not strictly above 5k/6.
        AdversarySpec a2;
        a2.corrupted_users = {wit.pc[3].members[0], wit.pc[3].members[1]};
        PcsgReport rep = pcsg_check(wit, a2);
        CHECK_FALSE(rep.holds);
        CHECK(std::count(rep.violated.begin(), rep.violated.end(), "pc-honesty") == 1);
    }
    SECTION("knowledge bits") {
        wit.neighbor_holds[11] = false;
        wit.members_hold[12] = false;
        PcsgReport rep = pcsg_check(wit, adv);
        CHECK_FALSE(rep.holds);
        CHECK(std::count(rep.violated.begin(), rep.violated.end(), "neighbor-holds") == 1);
        CHECK(std::count(rep.violated.begin(), rep.violated.end(), "members-hold") == 1);
    }
    SECTION("diameter budget") {
        wit.flood_iterations = 0;
        PcsgReport rep = pcsg_check(wit, adv);
        CHECK_FALSE(rep.holds);
        CHECK(std::count(rep.violated.begin(), rep.violated.end(), "diameter") == 1);
    }
}

TEST_CASE("partial blocking in the committee stage still clears the survivor floor") {
    // The tolerated-bound blocking scenario carried through the full setup:
    // every user survives both stages, so the malicious-server floor holds.
    SimConfig cfg;
    cfg.n = 64;
    cfg.kappa = 16;
    cfg.alpha = 0.1;
    const double eps = epsilon_slack(cfg.alpha);
    const double need = (1 - 2 * cfg.alpha - eps / 2) * cfg.kappa;
    const std::size_t tolerated = cfg.kappa - std::size_t(std::ceil(need - 1e-6));
    ShaveResponses strat(PcRound::sample_respond, tolerated);
    AdversarySpec adv;
    adv.server_corrupted = true;
    adv.strategy = &strat;
    Net net(cfg, adv);
    Rng rng(13);
    SetupOutcome out = setup_run(net, rng);

    CHECK(out.witness.alive.size() == cfg.n);
    PcsgReport rep = pcsg_check(out.witness, adv);
    CHECK(rep.holds);
}

// ---------------------------------------------------------------------------
// Electing one committee
// ---------------------------------------------------------------------------

namespace {

// Announce a forged member set — the same one to every committee, so the
// relays all agree and only the membership rule can trip. The extra member
// is the smallest id outside the honest set; its own committee knows it
// drew a different bin.
struct ForgeElection : Strategy {
    std::optional<std::pair<std::uint32_t, std::vector<std::uint32_t>>>
    election_result(std::uint32_t, std::uint32_t bin,
                    const std::vector<std::uint32_t>& comm) override {
        std::vector<std::uint32_t> forged = comm;
        std::uint32_t add = 1;
        while (std::binary_search(forged.begin(), forged.end(), add)) ++add;
        forged.insert(std::lower_bound(forged.begin(), forged.end(), add), add);
        return {{bin, forged}};
    }
};

// Tell one committee a different live-user count than everyone else.
struct SkewAliveCount : Strategy {
    std::uint32_t victim;
    explicit SkewAliveCount(std::uint32_t v) : victim(v) {}
    std::optional<std::uint32_t> alive_count(std::uint32_t owner, std::uint32_t honest) override {
        if (owner != victim) return std::nullopt;
        return honest + 5;
    }
};

} // namespace

TEST_CASE("honest election: unanimous, small committee, matches the tally oracle") {
    SimConfig cfg;
    cfg.n = 64;
    cfg.kappa = 8;
    cfg.alpha = 0.1;
    AdversarySpec adv;
    Net net(cfg, adv);
    Rng rng(3);
    SetupOutcome setup = setup_run(net, rng);
    REQUIRE(setup.witness.alive.size() == cfg.n);

    Rng erng(1001);
    ElectionOutcome out = elect_committee(net, setup.witness, setup.pc_run.pc_party, erng);

    CHECK(out.unanimous);
    REQUIRE(out.output[1].has_value());
    const ElectionResult& r = *out.output[1];
    CHECK(r.committee.size() <= cfg.kappa);
    CHECK(r.bins == (cfg.n + cfg.kappa - 1) / cfg.kappa);
    CHECK(r.bin >= 1);
    CHECK(r.bin <= r.bins);
    for (std::uint32_t i : setup.witness.alive) {
        REQUIRE(out.output[i].has_value());
        CHECK(out.output[i]->committee == r.committee);
        CHECK(out.output[i]->bin == r.bin);
        CHECK(out.halt_stage[i].empty());
        CHECK(out.halt_iteration[i] == ElectionOutcome::never);
    }

    // Oracle: re-derive every draw from the same seed and tally by hand.
    const std::uint32_t b = (cfg.n + cfg.kappa - 1) / cfg.kappa;
    std::vector<std::uint32_t> tally(b + 1, 0);
    std::vector<std::uint32_t> draw(cfg.n + 1, 0);
    Rng oracle(1001);
    for (std::uint32_t i = 1; i <= cfg.n; ++i) {
        draw[i] = std::uint32_t(oracle.fork("elect-bin", i).below(b)) + 1;
        ++tally[draw[i]];
    }
    std::uint32_t best = 1;
    for (std::uint32_t x = 2; x <= b; ++x)
        if (tally[x] < tally[best]) best = x;
    CHECK(r.bin == best);
    std::vector<std::uint32_t> expect;
    for (std::uint32_t i = 1; i <= cfg.n; ++i)
        if (draw[i] == best) expect.push_back(i);
    CHECK(r.committee == expect);
    CHECK(out.honest.committee == expect);

    // Occupancy forms a partition of the live committees.
    std::uint32_t sum = 0;
    for (std::uint32_t x = 1; x <= b; ++x) sum += tally[x];
    CHECK(sum == cfg.n);
}

TEST_CASE("election over an ideal state: the winning bin is never oversubscribed") {
    // 130 committees into ceil(130/12) = 11 bins: the least-occupied bin
    // holds at most floor(130/11) = 11 <= kappa committees, whatever the
    // draws are. Checked across several seeds.
    AdversarySpec adv;
    SimConfig cfg;
    cfg.n = 130;
    cfg.kappa = 12;
    cfg.alpha = 0.1;
    Rng wrng(55);
    PcsgWitness wit = ideal_setup(cfg.n, cfg.kappa, cfg.alpha, wrng);
    REQUIRE(pcsg_check(wit, adv).holds);

    for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
        Net net(cfg, adv);
        Rng erng(seed);
        ElectionOutcome out = elect_committee(net, wit, erng);
        CHECK(out.unanimous);
        REQUIRE(out.output[1].has_value());
        CHECK(out.output[1]->bins == 11u);
        CHECK(out.output[1]->committee.size() <= cfg.kappa);
        CHECK(out.output[1]->bin >= 1);
        CHECK(out.output[1]->bin <= 11u);
        for (std::uint32_t m : out.output[1]->committee) CHECK(wit.is_alive(m));
    }
}

TEST_CASE("a forged member list floods bottom to every committee in budget") {
    SimConfig cfg;
    cfg.n = 64;
    cfg.kappa = 8;
    cfg.alpha = 0.1;
    ForgeElection strat;
    AdversarySpec adv;
    adv.server_corrupted = true;
    adv.strategy = &strat;
    Net net(cfg, adv);
    Rng rng(3);
    SetupOutcome setup = setup_run(net, rng);
    REQUIRE(setup.witness.alive.size() == cfg.n);

    Rng erng(1001);
    ElectionOutcome out = elect_committee(net, setup.witness, setup.pc_run.pc_party, erng);

    CHECK_FALSE(out.unanimous);
    std::uint32_t victim = 1;
    while (std::binary_search(out.honest.committee.begin(), out.honest.committee.end(), victim))
        ++victim;
    CHECK(out.halt_stage[victim] == "result-check");
    for (std::uint32_t i = 1; i <= cfg.n; ++i) {
        CHECK_FALSE(out.output[i].has_value());
        CHECK_FALSE(out.halt_stage[i].empty());
        if (out.halt_stage[i] == "result-alive")
            CHECK(out.halt_iteration[i] <= setup.witness.flood_iterations);
        else
            CHECK((out.halt_stage[i] == "result-check"));
    }
}

TEST_CASE("a skewed live-user count is fatal for the whole graph") {
    SimConfig cfg;
    cfg.n = 64;
    cfg.kappa = 8;
    cfg.alpha = 0.1;
    const std::uint32_t victim = 17;
    SkewAliveCount strat(victim);
    AdversarySpec adv;
    adv.server_corrupted = true;
    adv.strategy = &strat;
    Net net(cfg, adv);
    Rng rng(3);
    SetupOutcome setup = setup_run(net, rng);
    REQUIRE(setup.witness.alive.size() == cfg.n);

    Rng erng(1001);
    ElectionOutcome out = elect_committee(net, setup.witness, setup.pc_run.pc_party, erng);

    CHECK_FALSE(out.unanimous);
    CHECK(out.halt_stage[victim] == "count-mismatch");
    for (std::uint32_t j : setup.witness.neighbors[victim])
        CHECK(out.halt_stage[j] == "count-mismatch");
    for (std::uint32_t i = 1; i <= cfg.n; ++i) {
        CHECK_FALSE(out.output[i].has_value());
        bool known = out.halt_stage[i] == "count-mismatch" || out.halt_stage[i] == "count-alive";
        CHECK(known);
    }
}

// ---------------------------------------------------------------------------
// Committee tree
// ---------------------------------------------------------------------------

namespace {

// Block the k-th message (in delivery order) of the first round whose
// virtual-to-virtual traffic has exactly `round_size` messages. With tree
// spawn rounds this singles out one parent-to-child key handoff.
struct BlockTreeEdge : Strategy {
    std::uint32_t n;
    std::size_t round_size, kth;
    bool done = false;
    BlockTreeEdge(std::uint32_t users, std::size_t size, std::size_t k)
        : n(users), round_size(size), kth(k) {}
    std::vector<std::size_t> select_blocks(std::uint32_t,
                                           const std::vector<MetaRecord>& meta) override {
        if (done) return {};
        std::vector<std::size_t> vv;
        for (std::size_t i = 0; i < meta.size(); ++i)
            if (meta[i].src.v > n && meta[i].dst.v > n) vv.push_back(i);
        if (vv.size() != round_size) return {};
        done = true;
        return {vv[kth]};
    }
};

// Substitute the key the server relays to the personal committees of the
// first `count` root-committee members it is asked about.
struct PoisonRelayedKey : Strategy {
    std::size_t count;
    std::set<std::uint32_t> hit;
    explicit PoisonRelayedKey(std::size_t c) : count(c) {}
    std::optional<Bytes> relayed_key(std::uint32_t target, const Bytes& honest) override {
        if (hit.size() >= count && !hit.count(target)) return std::nullopt;
        hit.insert(target);
        Bytes b = honest;
        b[0] ^= 0x80;
        return b;
    }
};

} // namespace

TEST_CASE("full pipeline: setup, election, and a full tree of accepted committees") {
    SimConfig cfg;
    cfg.n = 512;
    cfg.kappa = 32;
    cfg.alpha = 0.1;
    AdversarySpec adv;
    Net net(cfg, adv);
    Rng rng(21);
    SetupOutcome setup = setup_run(net, rng);
    REQUIRE(setup.witness.alive.size() == cfg.n);

    Rng erng(11); // lightest bin holds 26 committees, above the key threshold
    ElectionOutcome elect = elect_committee(net, setup.witness, setup.pc_run.pc_party, erng);
    REQUIRE(elect.unanimous);
    const ElectionResult& c0 = *elect.output[1];
    REQUIRE(c0.committee.size() == 26);

    Rng trng(5);
    TreeOutcome out =
        many_committees(net, setup.witness, setup.pc_run.pc_party, c0, trng);

    CHECK(out.produced);
    CHECK_FALSE(out.root_abort);
    CHECK_FALSE(out.floor_abort);
    CHECK(out.alive_total == cfg.n);
    REQUIRE(out.tree.committees.size() == cfg.n + 1);
    CHECK(out.tree.committees[0] == c0.committee);
    for (std::uint32_t j = 1; j <= cfg.n; ++j) {
        CHECK(out.committee_active[j]);
        CHECK(out.tree.committees[j].size() == cfg.kappa);
        CHECK(std::is_sorted(out.tree.committees[j].begin(), out.tree.committees[j].end()));
        CHECK(out.tree.committees[j].front() >= 1);
        CHECK(out.tree.committees[j].back() <= cfg.n);
    }
    for (std::uint32_t i = 1; i <= cfg.n; ++i) {
        CHECK(out.user_has_pk[i]);
        CHECK(out.user_accepted[i]);
        CHECK_FALSE(out.user_halted[i]);
    }

    // The network run realizes exactly the reference sampler's tree.
    Rng ref(5);
    CommitteeTree ideal = ideal_many_committees(cfg.n, cfg.kappa, c0.committee, ref);
    CHECK(out.tree.committees == ideal.committees);
}

TEST_CASE("a blocked key handoff starves the subtree and drags the root down") {
    SimConfig cfg;
    cfg.n = 64;
    cfg.kappa = 8;
    cfg.alpha = 0.1;
    // First spawn round with 4 messages is the handoff to nodes 3..6;
    // index 2 in (src,dst) order is the edge 2 -> 5.
    BlockTreeEdge strat(cfg.n, 4, 2);
    AdversarySpec adv;
    adv.server_corrupted = true;
    adv.strategy = &strat;
    Net net(cfg, adv);
    Rng rng(21);
    SetupOutcome setup = setup_run(net, rng);
    REQUIRE(setup.witness.alive.size() == cfg.n);
    Rng erng(1); // six-member root committee, just over the key threshold
    ElectionOutcome elect = elect_committee(net, setup.witness, setup.pc_run.pc_party, erng);
    REQUIRE(elect.unanimous);

    Rng trng(5);
    TreeOutcome out =
        many_committees(net, setup.witness, setup.pc_run.pc_party, *elect.output[1], trng);

    CHECK(strat.done);
    CHECK_FALSE(out.committee_active[5]);
    CHECK_FALSE(out.committee_active[11]); // children of a starved node never spawn
    CHECK_FALSE(out.committee_active[12]);
    CHECK_FALSE(out.user_accepted[5]);
    CHECK(out.root_abort);
    CHECK_FALSE(out.produced);
    for (std::uint32_t i = 1; i <= cfg.n; ++i) CHECK(out.user_halted[i]);
    // Siblings outside the starved subtree still accepted their nonces
    // before the aggregation verdict arrived.
    CHECK(out.user_accepted[6]);
}

TEST_CASE("key poisoning: the acceptance threshold separates two from three slots") {
    SimConfig cfg;
    cfg.n = 64;
    cfg.kappa = 16;
    cfg.alpha = 0.1;
    // Election seed 2 gives a 14-member root committee; the per-array
    // acceptance line is (2/3 + eps/2) * 16 = 11.2 filled slots.
    auto run = [&](std::size_t poisoned) {
        PoisonRelayedKey strat(poisoned);
        AdversarySpec adv;
        adv.server_corrupted = true;
        adv.strategy = &strat;
        Net net(cfg, adv);
        Rng rng(13);
        SetupOutcome setup = setup_run(net, rng);
        REQUIRE(setup.witness.alive.size() == cfg.n);
        Rng erng(2);
        ElectionOutcome elect = elect_committee(net, setup.witness, setup.pc_run.pc_party, erng);
        REQUIRE(elect.unanimous);
        REQUIRE(elect.output[1]->committee.size() == 14);
        Rng trng(5);
        return many_committees(net, setup.witness, setup.pc_run.pc_party, *elect.output[1],
                               trng);
    };

    SECTION("twelve intact slots clear the line") {
        TreeOutcome out = run(2);
        CHECK(out.produced);
        CHECK(out.alive_total == cfg.n);
        for (std::uint32_t i = 1; i <= cfg.n; ++i) CHECK(out.user_has_pk[i]);
    }
    SECTION("eleven intact slots fall below it and everyone halts") {
        TreeOutcome out = run(3);
        CHECK_FALSE(out.produced);
        CHECK(out.floor_abort);
        CHECK(out.alive_total == 0);
        for (std::uint32_t i = 1; i <= cfg.n; ++i) {
            CHECK_FALSE(out.user_has_pk[i]);
            CHECK_FALSE(out.user_accepted[i]);
            CHECK(out.user_halted[i]);
        }
    }
}

TEST_CASE("reference tree sampler: shape, range, and committee-load tail") {
    const std::uint32_t n = 512, kappa = 32;
    std::vector<std::uint32_t> c0 = {3, 7, 21};
    std::size_t worst = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Rng rng(seed);
        CommitteeTree tree = ideal_many_committees(n, kappa, c0, rng);
        REQUIRE(tree.committees.size() == n + 1);
        CHECK(tree.committees[0] == c0);
        std::vector<std::size_t> load(n + 1, 0);
        for (std::uint32_t j = 1; j <= n; ++j) {
            const auto& c = tree.committees[j];
            REQUIRE(c.size() == kappa);
            CHECK(std::adjacent_find(c.begin(), c.end()) == c.end());
            for (std::uint32_t m : c) {
                REQUIRE(m >= 1);
                REQUIRE(m <= n);
                ++load[m];
            }
        }
        worst = std::max(worst, *std::max_element(load.begin(), load.end()));
    }
    // Mean load is n*kappa/n = kappa; the observed maximum stays far under
    // the 3*kappa tail line at this scale.
    CHECK(worst <= 3 * std::size_t(kappa));
}
