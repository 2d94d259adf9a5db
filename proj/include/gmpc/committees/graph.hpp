#pragma once

// Locally sampled communication graphs: every vertex outside a bad set
// draws d uniform out-neighbors. Connectivity claims are about the
// *undirected* graph induced on a vertex subset, so the diameter routine
// symmetrizes edges first. Diameters here are tiny (a handful of hops) but
// the graphs are large, so all-pairs BFS runs 64 sources per pass with
// bitmask frontiers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "gmpc/common.hpp"
#include "gmpc/rng.hpp"

namespace gmpc {

struct OutGraph {
    std::uint32_t n = 0;                          // vertices are 1..n
    std::vector<std::vector<std::uint32_t>> out;  // index 0 unused
};

// Each vertex outside `bad` samples d distinct out-neighbors from all of
// 1..n (possibly including itself); bad vertices contribute no edges.
inline OutGraph graph_sample(Rng& rng, std::uint32_t n, std::uint32_t d,
                             const std::set<std::uint32_t>& bad) {
    require(d <= n, "graph_sample: d > n");
    OutGraph g;
    g.n = n;
    g.out.resize(n + 1);
    for (std::uint32_t v = 1; v <= n; ++v) {
        if (bad.count(v)) continue;
        g.out[v] = rng.sample_distinct(d, n);
        for (auto& w : g.out[v]) ++w;
        std::sort(g.out[v].begin(), g.out[v].end());
    }
    return g;
}

// Exact diameter of the undirected graph induced on `verts`; nullopt if
// the induced graph is disconnected (or empty).
inline std::optional<std::uint32_t> induced_diameter(const OutGraph& g,
                                                     const std::vector<std::uint32_t>& verts) {
    std::size_t m = verts.size();
    if (m == 0) return std::nullopt;
    if (m == 1) return 0;

    // Compact ids + symmetrized adjacency (CSR).
    std::vector<std::uint32_t> id(g.n + 1, UINT32_MAX);
    for (std::size_t i = 0; i < m; ++i) id[verts[i]] = std::uint32_t(i);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (std::uint32_t v : verts)
        for (std::uint32_t w : g.out[v])
            if (w <= g.n && id[w] != UINT32_MAX && w != v) {
                edges.push_back({id[v], id[w]});
                edges.push_back({id[w], id[v]});
            }
    std::vector<std::uint32_t> deg(m + 1, 0);
    for (auto [a, b] : edges) ++deg[a + 1];
    for (std::size_t i = 1; i <= m; ++i) deg[i] += deg[i - 1];
    std::vector<std::uint32_t> adj(edges.size());
    {
        std::vector<std::uint32_t> cursor(deg.begin(), deg.end() - 1);
        for (auto [a, b] : edges) adj[cursor[a]++] = b;
    }

    // 64 BFS sources per pass: reached[v] / frontier[v] are bitmasks over
    // the sources of the pass. All sources advance one level per sweep.
    std::uint32_t diameter = 0;
    std::vector<std::uint64_t> reached(m), frontier(m), next(m);
    for (std::size_t base = 0; base < m; base += 64) {
        std::size_t lanes = std::min<std::size_t>(64, m - base);
        std::fill(reached.begin(), reached.end(), 0);
        std::fill(frontier.begin(), frontier.end(), 0);
        for (std::size_t l = 0; l < lanes; ++l) {
            reached[base + l] |= std::uint64_t(1) << l;
            frontier[base + l] |= std::uint64_t(1) << l;
        }
        std::uint64_t all = lanes == 64 ? ~std::uint64_t(0)
                                        : ((std::uint64_t(1) << lanes) - 1);
        std::uint32_t level = 0;
        std::uint64_t done = 0; // lanes whose BFS already covered every vertex
        while (done != all) {
            std::fill(next.begin(), next.end(), 0);
            bool any = false;
            for (std::size_t v = 0; v < m; ++v) {
                std::uint64_t f = frontier[v];
                if (!f) continue;
                for (std::uint32_t e = deg[v]; e < deg[v + 1]; ++e) {
                    std::size_t w = adj[e];
                    std::uint64_t fresh = f & ~reached[w];
                    if (fresh) {
                        next[w] |= fresh;
                        any = true;
                    }
                }
            }
            if (!any) break; // remaining lanes cannot reach the rest: disconnected
            ++level;
            for (std::size_t v = 0; v < m; ++v) {
                reached[v] |= next[v];
                frontier[v] = next[v];
            }
            std::uint64_t covered = all;
            for (std::size_t v = 0; v < m && covered; ++v) covered &= reached[v];
            if (covered & ~done) diameter = std::max(diameter, level);
            done |= covered;
        }
        if (done != all) return std::nullopt;
    }
    return diameter;
}

// Iterations needed for a one-hop-per-round wave to cover the graph; also
// the number of alive pings the protocols run.
inline std::uint32_t flood_rounds(std::uint32_t n, std::uint32_t kappa) {
    if (kappa <= 4 || n <= 4) return 1;
    double l = std::log(double(n) / 4.0) / std::log(double(kappa) / 4.0);
    return std::uint32_t(std::ceil(l)) + 1;
}

} // namespace gmpc
