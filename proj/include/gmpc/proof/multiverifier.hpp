#pragma once

// One prover convinces n+1 weak verifiers that a published statement holds,
// over the simulated network and against its blocking adversary. The
// statement (one block per party) is spread as slices of an error-correcting
// encoding; a binary tree of the parties checks the encoding by summing
// locally-computable generator contributions against the slices the prover
// handed out, the designated verifier at the root then runs a proof backend
// whose statement queries are answered by the slice holders and whose proof
// queries are answered by commitment openings. Any blocked, missing or
// malformed answer reads as rejection, so the prover gains nothing by
// silence, and the verifier's verdict is flooded back down the tree.
//
// Party roles: node_party[0] is the designated verifier, node_party[i] holds
// slice i; the prover is a separate party (the server, in protocol use).

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gmpc/common.hpp"
#include "gmpc/crypto/merkle.hpp"
#include "gmpc/field.hpp"
#include "gmpc/net/simulator.hpp"
#include "gmpc/proof/lecc.hpp"
#include "gmpc/proof/pcpp.hpp"
#include "gmpc/rng.hpp"
#include "gmpc/serialize.hpp"

namespace gmpc {

// Verifier-side spot-check budget: kappa * ceil(log2 4n)^d checks. The row
// subset is drawn without replacement (capped at the holder count); the
// backend draws its block queries independently from the same budget.
struct QueryPlan {
    std::vector<std::uint32_t> rows; // sampled holder indices, sorted
    std::uint32_t block_queries = 0;
};

inline QueryPlan sample_query_plan(Rng& rng, std::uint32_t n_helpers, std::uint32_t kappa,
                                   std::uint32_t d = 1) {
    require(n_helpers >= 1, "sample_query_plan: need helpers");
    require(kappa >= 1, "sample_query_plan: bad kappa");
    std::uint64_t lg = ceil_log2(std::uint64_t(4) * n_helpers);
    std::uint64_t q = kappa;
    for (std::uint32_t t = 0; t < d; ++t) q *= lg;
    QueryPlan plan;
    plan.block_queries = std::uint32_t(q);
    std::uint32_t holders = n_helpers + 1;
    auto rows = rng.sample_distinct(std::size_t(std::min<std::uint64_t>(q, holders)), holders);
    std::sort(rows.begin(), rows.end());
    plan.rows = std::move(rows);
    return plan;
}

// What the designated verifier keeps after a run: enough to recognize valid
// openings of the committed proof later. Opened positions are only trusted
// once vc_verify_one passes against `root`.
struct ProofHandle {
    Bytes pub;
    VcParams pp{};
    VcCommitment root{};
    std::string backend_id;
};

// ---------------------------------------------------------------------------
// Packing statement blocks into parallel code instances
// ---------------------------------------------------------------------------

// Byte blocks ride through the field as length-prefixed 7-byte packings; the
// widest block fixes the number of parallel codewords and shorter blocks are
// zero-padded (the length prefix keeps that unambiguous).

inline std::uint32_t packed_width(const std::vector<Bytes>& blocks) {
    std::size_t w = 1;
    for (const Bytes& b : blocks) w = std::max(w, pack_bytes(b).size());
    return std::uint32_t(w);
}

inline std::vector<std::vector<Fp>> packed_columns(const std::vector<Bytes>& blocks,
                                                   std::uint32_t width) {
    std::vector<std::vector<Fp>> cols;
    cols.reserve(blocks.size());
    for (const Bytes& b : blocks) {
        auto e = pack_bytes(b);
        require(e.size() <= width, "packed_columns: width too small");
        e.resize(width, Fp(0));
        cols.push_back(std::move(e));
    }
    return cols;
}

// Encode `width` parallel messages (message element i of instance w is
// cols[i][w]) and split every codeword into per-holder slices.
inline std::vector<CodewordBlock> encode_blocks(const LeccRowTable& table,
                                                const std::vector<std::vector<Fp>>& cols,
                                                std::uint32_t width) {
    const LeccParams& lp = table.params();
    require(lp.f == 1, "encode_blocks: one message element per holder");
    require(cols.size() == lp.holders, "encode_blocks: column count mismatch");
    std::vector<CodewordBlock> out(lp.holders);
    for (std::uint32_t i = 0; i < lp.holders; ++i) {
        require(cols[i].size() == width, "encode_blocks: ragged columns");
        out[i].holder = i;
        out[i].values.assign(std::size_t(lp.slice) * width, Fp(0));
    }
    std::vector<Fp> msg(lp.k);
    for (std::uint32_t w = 0; w < width; ++w) {
        for (std::uint32_t i = 0; i < lp.holders; ++i) msg[i] = cols[i][w];
        auto cw = table.encode(msg);
        for (std::uint32_t j = 0; j < lp.length; ++j)
            out[j / lp.slice].values[std::size_t(w) * lp.slice + j % lp.slice] = cw[j];
    }
    return out;
}

// Wire form of a slice as the prover distributes it.
inline Bytes slice_message(const CodewordBlock& blk) {
    Writer w;
    w.u32(blk.holder);
    w.u32(std::uint32_t(blk.values.size()));
    for (Fp v : blk.values) w.fp(v);
    return w.take();
}

inline std::optional<CodewordBlock> parse_slice_message(const Bytes& b) {
    try {
        Reader r(b);
        CodewordBlock blk;
        blk.holder = r.u32();
        std::uint32_t n = r.u32();
        if (n > r.remaining() / 8) return std::nullopt;
        blk.values.resize(n);
        for (std::uint32_t i = 0; i < n; ++i) blk.values[i] = r.fp();
        if (!r.done()) return std::nullopt;
        return blk;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

// ---------------------------------------------------------------------------
// Tree layout
// ---------------------------------------------------------------------------

namespace detail {

// Nodes 0..holders-1 sit in a full binary tree padded with virtual
// zero-contribution nodes up to the next power of two above holders+1;
// node i's children are 2i+1 and 2i+2.
inline std::uint32_t tree_depth(std::uint32_t holders) {
    return std::uint32_t(ceil_log2(next_pow2(std::uint64_t(holders) + 1))) - 1;
}

inline std::pair<std::uint32_t, std::uint32_t> level_range(std::uint32_t lvl,
                                                           std::uint32_t holders) {
    std::uint32_t first = (1u << lvl) - 1;
    std::uint32_t last = std::min((1u << (lvl + 1)) - 1, holders);
    return {std::min(first, holders), last};
}

// Root-to-leaf flood of one payload, a level per round. Returns which nodes
// it reached (blocking cuts whole subtrees).
inline std::vector<std::uint8_t> tree_flood(Net& net, const std::vector<PartyId>& node_party,
                                            const Bytes& payload) {
    std::uint32_t holders = std::uint32_t(node_party.size());
    std::uint32_t depth = tree_depth(holders);
    std::vector<std::uint8_t> reached(holders, 0);
    reached[0] = 1;
    for (std::uint32_t lvl = 0; lvl < depth; ++lvl) {
        auto [first, last] = level_range(lvl, holders);
        for (std::uint32_t i = first; i < last; ++i) {
            if (!reached[i]) continue;
            for (std::uint32_t c : {2 * i + 1, 2 * i + 2})
                if (c < holders) net.submit(node_party[i], node_party[c], payload);
        }
        net.step();
        auto [cfirst, clast] = level_range(lvl + 1, holders);
        for (std::uint32_t c = cfirst; c < clast; ++c)
            if (!net.take_inbox(node_party[c]).empty()) reached[c] = 1;
    }
    return reached;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Tree-aggregated encoding check
// ---------------------------------------------------------------------------

struct TreeCheckOutcome {
    bool accept = false;
    bool structure_ok = true; // all sampled slices and partial sums arrived
    std::vector<std::uint32_t> mismatched_rows;
    // Aggregate per sampled row (only meaningful on acceptance):
    // aggregated[jj][w*slice + t] is codeword position rows[jj]*slice + t of
    // instance w, as recomputed from the parties' own inputs.
    std::vector<std::vector<Fp>> aggregated;
    std::vector<std::uint8_t> node_rejected; // who heard about a rejection
};

// Checks that the slices the prover distributed really encode what the
// parties hold. The sampled row set floods down; the sampled holders route
// their purported slices up; every node then adds, per sampled row, the
// generator contributions of its own message elements to its children's
// partial sums, and the root compares the total against the purported
// slices. Per-node work is O(|rows| * slice * instances) regardless of n,
// which is the entire reason the code's generator entries are individually
// computable. Any mismatch, missing slice or broken partial sum rejects,
// and the rejection floods back down the tree.
inline TreeCheckOutcome tree_encoding_check(Net& net, const LeccParams& lp,
                                            std::uint32_t instances,
                                            const std::vector<PartyId>& node_party,
                                            const std::vector<std::vector<Fp>>& node_input,
                                            const std::vector<CodewordBlock>& served,
                                            const std::vector<std::uint32_t>& rows) {
    const std::uint32_t holders = lp.holders;
    require(node_party.size() == holders, "tree_encoding_check: party list arity");
    require(node_input.size() == holders, "tree_encoding_check: input arity");
    require(served.size() == holders, "tree_encoding_check: slice arity");
    require(instances > 0, "tree_encoding_check: no instances");
    require(holders >= 2, "tree_encoding_check: tree needs at least two nodes");
    require(!rows.empty(), "tree_encoding_check: empty row sample");
    for (auto j : rows) require(j < holders, "tree_encoding_check: row out of range");
    for (std::uint32_t i = 0; i < holders; ++i)
        require(node_input[i].size() == std::size_t(lp.f) * instances,
                "tree_encoding_check: bad input width");

    const std::uint32_t depth = detail::tree_depth(holders);
    const std::size_t row_width = std::size_t(lp.slice) * instances;
    const std::size_t agg_width = rows.size() * row_width;
    LeccRowTable table(lp); // public setup shared by all parties

    TreeCheckOutcome out;
    out.node_rejected.assign(holders, 0);
    out.aggregated.assign(rows.size(), std::vector<Fp>(row_width, Fp(0)));
    std::vector<std::uint64_t> ops(holders, 0);

    std::map<std::uint32_t, std::uint32_t> node_of;
    for (std::uint32_t i = 0; i < holders; ++i) node_of[node_party[i].v] = i;

    // -- the sampled row set travels down the tree --
    Writer rw;
    rw.u8(1);
    rw.u32(std::uint32_t(rows.size()));
    for (auto j : rows) rw.u32(j);
    std::vector<std::uint8_t> knows = detail::tree_flood(net, node_party, rw.take());

    // -- sampled holders route their purported slices up, hop by hop --
    struct Routed {
        std::uint32_t origin;
        std::vector<Fp> values;
    };
    std::vector<std::vector<Routed>> queue(holders);
    std::map<std::uint32_t, std::vector<Fp>> purported;
    for (auto j : rows) {
        if (j == 0)
            purported[0] = served[0].values;
        else if (knows[j])
            queue[j].push_back({j, served[j].values});
    }
    for (std::uint32_t r = 0; r < depth; ++r) {
        for (std::uint32_t i = 1; i < holders; ++i) {
            if (queue[i].empty()) continue;
            Writer w;
            w.u8(2);
            w.u32(std::uint32_t(queue[i].size()));
            for (const auto& item : queue[i]) {
                w.u32(item.origin);
                w.u32(std::uint32_t(item.values.size()));
                for (Fp v : item.values) w.fp(v);
            }
            net.submit(node_party[i], node_party[(i - 1) / 2], w.take());
            queue[i].clear();
        }
        net.step();
        for (std::uint32_t i = 0; i < holders; ++i) {
            for (auto& env : net.take_inbox(node_party[i])) {
                try {
                    Reader rd(env.payload);
                    if (rd.u8() != 2) continue;
                    std::uint32_t cnt = rd.u32();
                    for (std::uint32_t c = 0; c < cnt; ++c) {
                        Routed item;
                        item.origin = rd.u32();
                        std::uint32_t nv = rd.u32();
                        if (nv > rd.remaining() / 8) break;
                        item.values.resize(nv);
                        for (std::uint32_t t = 0; t < nv; ++t) item.values[t] = rd.fp();
                        if (i == 0)
                            purported[item.origin] = std::move(item.values);
                        else
                            queue[i].push_back(std::move(item));
                    }
                } catch (const std::exception&) {
                    continue;
                }
            }
        }
    }

    // -- every node computes its own generator contributions --
    std::vector<std::vector<Fp>> contrib(holders);
    for (std::uint32_t i = 0; i < holders; ++i) {
        if (!knows[i]) continue;
        contrib[i].assign(agg_width, Fp(0));
        for (std::size_t jj = 0; jj < rows.size(); ++jj) {
            std::uint32_t j = rows[jj];
            for (std::uint32_t t = 0; t < lp.slice; ++t) {
                std::uint32_t pos = j * lp.slice + t;
                for (std::uint32_t u = 0; u < lp.f; ++u) {
                    Fp g = table.entry(pos, i * lp.f + u);
                    for (std::uint32_t w = 0; w < instances; ++w)
                        contrib[i][jj * row_width + std::size_t(w) * lp.slice + t] +=
                            g * node_input[i][std::size_t(w) * lp.f + u];
                }
            }
        }
        ops[i] += std::uint64_t(rows.size()) * lp.slice * lp.f * instances * 2;
    }

    // -- partial sums climb the tree, one level per round --
    std::vector<std::map<std::uint32_t, std::optional<std::vector<Fp>>>> child_got(holders);
    auto combine = [&](std::uint32_t i) -> std::optional<std::vector<Fp>> {
        if (!knows[i]) return std::nullopt;
        std::vector<Fp> acc = contrib[i];
        for (std::uint32_t c : {2 * i + 1, 2 * i + 2}) {
            if (c >= holders) continue; // virtual child, zero contribution
            auto it = child_got[i].find(c);
            if (it == child_got[i].end() || !it->second) return std::nullopt;
            const auto& v = *it->second;
            for (std::size_t t = 0; t < agg_width; ++t) acc[t] += v[t];
            ops[i] += agg_width;
        }
        return acc;
    };
    for (std::uint32_t lvl = depth; lvl >= 1; --lvl) {
        auto [first, last] = detail::level_range(lvl, holders);
        for (std::uint32_t i = first; i < last; ++i) {
            auto agg = combine(i);
            Writer w;
            w.u8(3);
            w.u8(agg ? 1 : 0);
            if (agg)
                for (Fp v : *agg) w.fp(v);
            net.submit(node_party[i], node_party[(i - 1) / 2], w.take());
        }
        net.step();
        auto [pfirst, plast] = detail::level_range(lvl - 1, holders);
        for (std::uint32_t p = pfirst; p < plast; ++p) {
            for (auto& env : net.take_inbox(node_party[p])) {
                auto src = node_of.find(env.src.v);
                if (src == node_of.end()) continue;
                std::uint32_t child = src->second;
                if ((child - 1) / 2 != p) continue;
                try {
                    Reader rd(env.payload);
                    if (rd.u8() != 3) continue;
                    if (rd.u8() == 0) {
                        child_got[p][child] = std::nullopt;
                        continue;
                    }
                    if (rd.remaining() != agg_width * 8) {
                        child_got[p][child] = std::nullopt;
                        continue;
                    }
                    std::vector<Fp> v(agg_width);
                    for (std::size_t t = 0; t < agg_width; ++t) v[t] = rd.fp();
                    child_got[p][child] = std::move(v);
                } catch (const std::exception&) {
                    child_got[p][child] = std::nullopt;
                }
            }
        }
    }

    // -- root verdict --
    auto total = combine(0);
    if (!total) out.structure_ok = false;
    for (std::size_t jj = 0; jj < rows.size(); ++jj) {
        std::uint32_t j = rows[jj];
        auto it = purported.find(j);
        if (it == purported.end()) {
            out.structure_ok = false;
            continue;
        }
        if (!total) continue;
        bool match = it->second.size() == row_width;
        if (match) {
            for (std::size_t t = 0; t < row_width; ++t)
                if ((*total)[jj * row_width + t] != it->second[t]) {
                    match = false;
                    break;
                }
        }
        ops[0] += row_width;
        if (match)
            std::copy(total->begin() + jj * row_width, total->begin() + (jj + 1) * row_width,
                      out.aggregated[jj].begin());
        else
            out.mismatched_rows.push_back(j);
    }
    out.accept = out.structure_ok && out.mismatched_rows.empty();

    // -- rejection floods back down --
    if (!out.accept) {
        Writer w;
        w.u8(4);
        out.node_rejected = detail::tree_flood(net, node_party, w.take());
    }

    for (std::uint32_t i = 0; i < holders; ++i)
        if (ops[i]) net.metrics().record_compute(node_party[i], ops[i]);
    return out;
}

// ---------------------------------------------------------------------------
// Full proof run
// ---------------------------------------------------------------------------

struct MvpOptions {
    std::uint32_t d = 1;              // spot-check budget exponent
    std::uint32_t row_override = 0;   // nonzero: sample exactly this many rows
    std::uint32_t query_override = 0; // nonzero: backend query budget
    bool prover_abort_mid = false;    // prover distributes slices, then stops
    bool prover_mute_queries = false; // prover commits, then ignores queries
};

struct MvpOutcome {
    bool encoding_ok = false;
    bool accept = false;
    std::vector<std::uint8_t> node_accept; // who learned of an acceptance
    std::uint32_t instances = 0;
    std::uint32_t rows_sampled = 0;
    std::uint32_t block_queries = 0;
    ProofHandle handle;
};

namespace detail {

inline std::vector<std::uint32_t> root_path(std::uint32_t node) {
    std::vector<std::uint32_t> path{node};
    while (node != 0) {
        node = (node - 1) / 2;
        path.push_back(node);
    }
    std::reverse(path.begin(), path.end());
    return path;
}

// Forward a payload along a node path, one hop per round; the payload each
// hop forwards is whatever actually arrived. Returns the last delivery or
// nullopt if some hop was blocked.
inline std::optional<Bytes> relay_along(Net& net, const std::vector<PartyId>& node_party,
                                        const std::vector<std::uint32_t>& path, Bytes payload) {
    for (std::size_t h = 0; h + 1 < path.size(); ++h) {
        net.submit(node_party[path[h]], node_party[path[h + 1]], payload);
        net.step();
        auto got = net.take_inbox(node_party[path[h + 1]]);
        if (got.empty()) return std::nullopt;
        payload = std::move(got.front().payload);
    }
    return payload;
}

} // namespace detail

// Runs the whole proof over the network: slice distribution, tree encoding
// check, proof commitment, oracle-backed verification, verdict flood. The
// prover's slices pass through the adversary's prover_slice hook when the
// server is corrupted; every later prover message can be blocked or withheld
// and each such failure turns into a rejection.
inline MvpOutcome multiverifier_proof_run(Net& net, PartyId prover,
                                          const std::vector<PartyId>& node_party,
                                          const std::vector<Bytes>& node_blocks, const Bytes& pub,
                                          const PcppBackend& backend, Rng& rng,
                                          const MvpOptions& opt = {}) {
    const std::uint32_t holders = std::uint32_t(node_party.size());
    require(holders >= 3, "multiverifier_proof_run: need at least three parties");
    require(node_blocks.size() == holders, "multiverifier_proof_run: block arity");
    const AdversarySpec& adv = net.adversary();
    Strategy& strat = adv.strat();

    LeccParams lp = LeccParams::make(holders - 1);
    LeccRowTable table(lp);
    MvpOutcome out;
    out.node_accept.assign(holders, 0);

    // -- prover encodes the statement and hands out slices --
    const std::uint32_t width = packed_width(node_blocks);
    out.instances = width;
    auto cols = packed_columns(node_blocks, width);
    auto slices = encode_blocks(table, cols, width);
    for (std::uint32_t i = 0; i < holders; ++i) {
        Bytes payload = slice_message(slices[i]);
        if (adv.server_corrupted) {
            auto sub = strat.prover_slice(i, payload);
            if (sub) payload = std::move(*sub);
        }
        net.submit(prover, node_party[i], payload);
    }
    net.step();
    std::vector<CodewordBlock> served(holders);
    for (std::uint32_t i = 0; i < holders; ++i) {
        served[i].holder = i;
        auto got = net.take_inbox(node_party[i]);
        if (got.empty()) continue;
        auto blk = parse_slice_message(got.front().payload);
        if (blk && blk->holder == i) served[i] = std::move(*blk);
    }

    // -- sampled rows, then the tree checks the encoding --
    Rng rows_rng = rng.fork("rows");
    QueryPlan plan = sample_query_plan(rows_rng, holders - 1, net.config().kappa, opt.d);
    if (opt.row_override > 0) {
        plan.rows = rows_rng.sample_distinct(std::min(opt.row_override, holders), holders);
        std::sort(plan.rows.begin(), plan.rows.end());
    }
    out.rows_sampled = std::uint32_t(plan.rows.size());
    out.block_queries = opt.query_override ? opt.query_override : plan.block_queries;

    auto tc = tree_encoding_check(net, lp, width, node_party, cols, served, plan.rows);
    out.encoding_ok = tc.accept;

    Writer rejw;
    rejw.u8(17);
    rejw.u8(0);
    const Bytes reject_msg = rejw.take();
    if (!tc.accept) {
        // Nodes already heard the tree check's rejection; tell the prover.
        net.submit(node_party[0], prover, reject_msg);
        net.step();
        return out;
    }

    // -- proof commitment: position count, parameters, root --
    std::vector<Bytes> positions;
    if (!opt.prover_abort_mid) {
        positions = backend.prove(pub, node_blocks);
        Writer w;
        w.u8(10);
        w.u32(std::uint32_t(positions.size()));
        net.submit(prover, node_party[0], w.take());
    }
    net.step();
    auto reject_run = [&]() {
        net.submit(node_party[0], prover, reject_msg);
        detail::tree_flood(net, node_party, reject_msg);
        return out;
    };
    std::uint32_t count = 0;
    {
        auto got = net.take_inbox(node_party[0]);
        if (got.empty()) return reject_run();
        try {
            Reader r(got.front().payload);
            if (r.u8() != 10) return reject_run();
            count = r.u32();
            if (!r.done()) return reject_run();
        } catch (const std::exception&) {
            return reject_run();
        }
    }
    if (count == 0 || count != positions.size()) return reject_run();

    VcParams pp = vc_setup(count);
    {
        Writer w;
        w.u8(11);
        w.u32(pp.size);
        w.u32(pp.leaves);
        net.submit(node_party[0], prover, w.take());
    }
    net.step();
    (void)net.take_inbox(prover);

    Rng commit_rng = rng.fork("commit");
    auto [aux, root] = vc_commit(pp, positions, commit_rng);
    {
        Writer w;
        w.u8(12);
        w.raw(Bytes(root.begin(), root.end()));
        net.submit(prover, node_party[0], w.take());
    }
    net.step();
    VcCommitment seen_root{};
    {
        auto got = net.take_inbox(node_party[0]);
        if (got.empty()) return reject_run();
        try {
            Reader r(got.front().payload);
            if (r.u8() != 12) return reject_run();
            Bytes rb = r.fixed(32);
            if (!r.done()) return reject_run();
            std::copy(rb.begin(), rb.end(), seen_root.begin());
        } catch (const std::exception&) {
            return reject_run();
        }
    }
    out.handle = ProofHandle{pub, pp, seen_root, backend.id()};

    // -- oracle-backed verification --
    // Statement queries ride the tree to the holder and back; each slice is
    // fetched once and cached. Proof queries are opening round trips with
    // the prover, checked against the commitment.
    std::map<std::uint32_t, std::optional<std::vector<Fp>>> slice_cache;
    auto fetch_slice = [&](std::uint32_t s) -> const std::optional<std::vector<Fp>>& {
        auto it = slice_cache.find(s);
        if (it != slice_cache.end()) return it->second;
        std::optional<std::vector<Fp>> vals;
        if (s == 0) {
            if (served[0].values.size() == std::size_t(lp.slice) * width)
                vals = served[0].values;
        } else {
            auto path = detail::root_path(s);
            Writer req;
            req.u8(15);
            req.u32(s);
            auto arrived = detail::relay_along(net, node_party, path, req.take());
            if (arrived) {
                Writer rep;
                rep.u8(16);
                rep.u32(s);
                rep.u32(std::uint32_t(served[s].values.size()));
                for (Fp v : served[s].values) rep.fp(v);
                std::reverse(path.begin(), path.end());
                auto back = detail::relay_along(net, node_party, path, rep.take());
                if (back) {
                    try {
                        Reader r(*back);
                        if (r.u8() == 16 && r.u32() == s) {
                            std::uint32_t nv = r.u32();
                            if (nv == std::size_t(lp.slice) * width &&
                                nv <= r.remaining() / 8) {
                                std::vector<Fp> v(nv);
                                for (std::uint32_t t = 0; t < nv; ++t) v[t] = r.fp();
                                if (r.done()) vals = std::move(v);
                            }
                        }
                    } catch (const std::exception&) {
                    }
                }
            }
        }
        return slice_cache.emplace(s, std::move(vals)).first->second;
    };

    PcppBackend::Oracles oracles;
    oracles.blocks = holders;
    oracles.proof_positions = count;
    oracles.statement = [&](std::uint32_t b) -> std::optional<Bytes> {
        if (b >= holders) return std::nullopt;
        const auto& sv = fetch_slice(b / 3);
        if (!sv) return std::nullopt;
        std::vector<Fp> elems(width);
        for (std::uint32_t w = 0; w < width; ++w)
            elems[w] = (*sv)[std::size_t(w) * lp.slice + b % 3];
        try {
            return unpack_bytes(elems);
        } catch (const std::exception&) {
            return std::nullopt;
        }
    };
    oracles.proof = [&](std::uint32_t p) -> std::optional<Bytes> {
        if (p >= count) return std::nullopt;
        Writer q;
        q.u8(13);
        q.u32(p);
        net.submit(node_party[0], prover, q.take());
        net.step();
        (void)net.take_inbox(prover);
        if (!opt.prover_mute_queries) {
            VcOpening o = vc_open_one(aux, p);
            Writer w;
            w.u8(14);
            write_opening(w, o);
            net.submit(prover, node_party[0], w.take());
        }
        net.step();
        auto got = net.take_inbox(node_party[0]);
        if (got.empty()) return std::nullopt;
        try {
            Reader r(got.front().payload);
            if (r.u8() != 14) return std::nullopt;
            VcOpening o = read_opening(r);
            if (!r.done()) return std::nullopt;
            if (o.index != p) return std::nullopt;
            if (!vc_verify_one(pp, seen_root, o)) return std::nullopt;
            return o.value;
        } catch (const std::exception&) {
            return std::nullopt;
        }
    };

    Rng backend_rng = rng.fork("backend");
    bool verdict = backend.verify(pub, oracles, out.block_queries, backend_rng);
    out.accept = verdict;

    // -- verdict reaches the prover and floods down the tree --
    Writer vw;
    vw.u8(17);
    vw.u8(verdict ? 1 : 0);
    Bytes vmsg = vw.take();
    net.submit(node_party[0], prover, vmsg);
    auto reached = detail::tree_flood(net, node_party, vmsg);
    if (verdict) out.node_accept = std::move(reached);
    return out;
}

} // namespace gmpc
