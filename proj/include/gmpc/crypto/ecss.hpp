#pragma once

// Error-correcting secret sharing: shares form a Reed-Solomon codeword
// (degree-t polynomial evaluated at 1..n_s), so reconstruction can tolerate
// wrong share *values* — not just missing shares — via Berlekamp-Welch
// decoding. With t < n_s/3, up to t corrupted shares are corrected.

#include <optional>
#include <vector>

#include "gmpc/crypto/poly.hpp"
#include "gmpc/crypto/shamir.hpp"

namespace gmpc {

// Any solution of A x = b over Fp, or nullopt when inconsistent.
// Free variables are set to zero.
inline std::optional<std::vector<Fp>> solve_linear(std::vector<std::vector<Fp>> a,
                                                   std::vector<Fp> b) {
    std::size_t rows = a.size();
    std::size_t cols = rows == 0 ? 0 : a[0].size();
    std::vector<std::size_t> pivot_col(rows, SIZE_MAX);
    std::size_t rank = 0;
    for (std::size_t col = 0; col < cols && rank < rows; ++col) {
        std::size_t sel = SIZE_MAX;
        for (std::size_t r = rank; r < rows; ++r)
            if (a[r][col] != Fp(0)) { sel = r; break; }
        if (sel == SIZE_MAX) continue;
        std::swap(a[sel], a[rank]);
        std::swap(b[sel], b[rank]);
        Fp inv = a[rank][col].inv();
        for (std::size_t c = col; c < cols; ++c) a[rank][c] *= inv;
        b[rank] *= inv;
        for (std::size_t r = 0; r < rows; ++r) {
            if (r == rank || a[r][col] == Fp(0)) continue;
            Fp f = a[r][col];
            for (std::size_t c = col; c < cols; ++c) a[r][c] -= f * a[rank][c];
            b[r] -= f * b[rank];
        }
        pivot_col[rank] = col;
        ++rank;
    }
    for (std::size_t r = rank; r < rows; ++r)
        if (b[r] != Fp(0)) return std::nullopt;
    std::vector<Fp> x(cols, Fp(0));
    for (std::size_t r = 0; r < rank; ++r) x[pivot_col[r]] = b[r];
    return x;
}

inline ShareVector ecss_share(Fp secret, std::uint32_t n_s, std::uint32_t t, Rng& rng) {
    return shamir_share(secret, n_s, t, rng);
}

// Berlekamp-Welch: recover the degree-<k polynomial through the points when
// at most e_max values are wrong. Returns nullopt if no consistent decoding.
inline std::optional<Poly> rs_decode(const std::vector<std::pair<Fp, Fp>>& points,
                                     std::uint32_t k, std::uint32_t e_max) {
    std::size_t m = points.size();
    if (m < k) return std::nullopt;
    for (std::uint32_t e = std::min<std::uint32_t>(e_max, std::uint32_t((m - k) / 2));; --e) {
        // Unknowns: Q (deg <= k-1+e, k+e coeffs) then E without its monic
        // lead (e coeffs). Equation per point: Q(x) - y*E(x) = y*x^e.
        std::size_t unknowns = k + 2 * std::size_t(e);
        std::vector<std::vector<Fp>> a(m, std::vector<Fp>(unknowns, Fp(0)));
        std::vector<Fp> rhs(m);
        for (std::size_t i = 0; i < m; ++i) {
            Fp x = points[i].first, y = points[i].second;
            Fp pw(1);
            for (std::size_t j = 0; j < k + e; ++j) { a[i][j] = pw; pw *= x; }
            pw = Fp(1);
            for (std::size_t j = 0; j < e; ++j) { a[i][k + e + j] = Fp(0) - y * pw; pw *= x; }
            rhs[i] = y * x.pow(e);
        }
        if (auto sol = solve_linear(std::move(a), std::move(rhs))) {
            Poly q(sol->begin(), sol->begin() + k + e);
            Poly locator(sol->begin() + k + e, sol->end());
            locator.push_back(Fp(1)); // monic x^e term
            if (auto f = poly_divide_exact(q, locator)) {
                if (f->size() <= k || poly_deg(*f) < k) {
                    std::uint32_t disagreements = 0;
                    for (auto& [x, y] : points)
                        if (poly_eval(*f, x) != y) ++disagreements;
                    if (disagreements <= e_max) {
                        f->resize(k, Fp(0));
                        return f;
                    }
                }
            }
        }
        if (e == 0) break;
    }
    return std::nullopt;
}

// Reconstruct from shares that may contain up to `t` wrong values.
// Requires t < n_s/3 so the code distance covers t errors.
inline std::optional<Fp> ecss_recon(const ShareVector& shares, std::uint32_t t) {
    std::uint32_t k = t + 1;
    if (shares.size() < k) return std::nullopt;
    std::uint32_t e_max = std::uint32_t((shares.size() - k) / 2);
    std::vector<std::pair<Fp, Fp>> pts;
    pts.reserve(shares.size());
    for (const Share& s : shares) pts.push_back({Fp(s.index), s.value});
    auto f = rs_decode(pts, k, std::min(e_max, t));
    if (!f) return std::nullopt;
    return poly_eval(*f, Fp(0));
}

inline std::vector<Bytes> ecss_share_bytes(const Bytes& data, std::uint32_t n_s,
                                           std::uint32_t t, Rng& rng) {
    return shamir_share_bytes(data, n_s, t, rng);
}

inline std::optional<Bytes> ecss_recon_bytes(
    const std::vector<std::pair<std::uint32_t, Bytes>>& holder_shares, std::uint32_t t) {
    if (holder_shares.size() < t + 1) return std::nullopt;
    std::vector<Reader> readers;
    readers.reserve(holder_shares.size());
    for (auto& [idx, b] : holder_shares) readers.emplace_back(b);
    // A corrupted holder may lie about the element count; honest holders
    // (a > 2/3 majority) all agree, so take the most frequent claim.
    std::vector<std::uint32_t> claims;
    for (auto& r : readers)
        claims.push_back(r.remaining() >= 4 ? r.u32() : 0);
    std::uint32_t n_elems = 0;
    std::size_t best = 0;
    for (std::uint32_t v : claims) {
        std::size_t votes = 0;
        for (std::uint32_t w : claims)
            if (w == v) ++votes;
        if (votes > best) { best = votes; n_elems = v; }
    }
    if (best * 3 < claims.size() * 2) return std::nullopt;
    std::vector<Fp> elems(n_elems);
    for (std::uint32_t e = 0; e < n_elems; ++e) {
        ShareVector sv;
        for (std::size_t h = 0; h < readers.size(); ++h) {
            Fp v = readers[h].remaining() >= 8 ? readers[h].fp() : Fp(0);
            sv.push_back({holder_shares[h].first, v});
        }
        auto dec = ecss_recon(sv, t);
        if (!dec) return std::nullopt;
        elems[e] = *dec;
    }
    std::size_t len = elems.empty() ? 0 : elems[0].value();
    if (elems.size() < 1 + (len + 6) / 7) return std::nullopt;
    return unpack_bytes(elems);
}

} // namespace gmpc
