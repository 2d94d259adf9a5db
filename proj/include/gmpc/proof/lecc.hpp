#pragma once

// Locally encodable error-correcting code: a systematic Reed-Solomon code of
// rate 1/3 over the simulator's prime field, evaluation domain 1..3k. The
// point of this particular layout is that any single generator entry G(j,i)
// is computable from factorial tables in O(1) — a party holding one message
// symbol can produce its additive share of any codeword position without
// ever seeing the rest of the message, which is what lets the encoding be
// checked by summing contributions up a tree instead of re-encoding.
//
// Codewords are split into `holders` consecutive slices of 3f symbols each
// (f = log^c n redundancy, 1 by default), so slice i is exactly the part of
// the codeword that party i can be asked about.

#include <algorithm>
#include <optional>
#include <vector>

#include "gmpc/common.hpp"
#include "gmpc/crypto/poly.hpp"
#include "gmpc/field.hpp"

namespace gmpc {

struct LeccParams {
    std::uint32_t holders = 0; // n + 1 slice holders
    std::uint32_t f = 1;       // symbols of message per holder
    std::uint32_t k = 0;       // message length = holders * f
    std::uint32_t length = 0;  // codeword length = 3k
    std::uint32_t slice = 0;   // symbols per holder slice = 3f

    // Minimum distance of an [3k, k] MDS code.
    std::uint32_t distance() const { return length - k + 1; }

    static LeccParams make(std::uint32_t n_helpers, std::uint32_t c = 0) {
        require(n_helpers >= 1, "LeccParams::make: need at least one helper");
        std::uint64_t lg = ceil_log2(std::max<std::uint64_t>(2, n_helpers));
        std::uint64_t f = 1;
        for (std::uint32_t t = 0; t < c; ++t) f *= lg;
        LeccParams lp;
        lp.holders = n_helpers + 1;
        lp.f = std::uint32_t(f);
        lp.k = lp.holders * lp.f;
        lp.length = 3 * lp.k;
        lp.slice = 3 * lp.f;
        return lp;
    }
};

// One holder's view of a codeword: positions [holder*slice, (holder+1)*slice)
// of every parallel instance, laid out instance-major
// (values[w*slice + t] = instance w, offset t). Concatenating the slices of
// all holders in order restores the full codewords.
struct CodewordBlock {
    std::uint32_t holder = 0;
    std::vector<Fp> values;
};

// Single generator entry, naive O(k) product form. Positions below k are the
// systematic identity; a parity position j evaluates the Lagrange basis
// polynomial of node i+1 at the point j+1.
inline Fp lecc_row(const LeccParams& lp, std::uint32_t j, std::uint32_t i) {
    require(j < lp.length, "lecc_row: position out of range");
    require(i < lp.k, "lecc_row: message index out of range");
    if (j < lp.k) return Fp(j == i ? 1 : 0);
    Fp y(j + 1), xi(i + 1), num(1), den(1);
    for (std::uint32_t t = 0; t < lp.k; ++t) {
        if (t == i) continue;
        Fp xt(t + 1);
        num *= y - xt;
        den *= xi - xt;
    }
    return num * den.inv();
}

// Factorial/inverse tables over the evaluation domain. Building the table
// costs O(length) multiplications and one field inversion; afterwards any
// generator entry is three lookups and two multiplications:
//   G(j,i) = N(j) * w(i) / (j - i)   for parity positions j >= k, where
//   N(j) = prod_{t=1..k} (j+1-t) = j! / (j-k)!     and
//   w(i)  = (-1)^{k-1-i} / (i! (k-1-i)!)  is the Lagrange weight of node i+1.
class LeccRowTable {
  public:
    explicit LeccRowTable(const LeccParams& lp) : lp_(lp) {
        std::uint32_t m = lp.length;
        fact_.resize(m + 1);
        inv_fact_.resize(m + 1);
        inv_.resize(m + 1);
        fact_[0] = Fp(1);
        for (std::uint32_t u = 1; u <= m; ++u) fact_[u] = fact_[u - 1] * Fp(u);
        inv_fact_[m] = fact_[m].inv();
        for (std::uint32_t u = m; u >= 1; --u) inv_fact_[u - 1] = inv_fact_[u] * Fp(u);
        inv_[0] = Fp(0); // never used; domain points are distinct
        for (std::uint32_t u = 1; u <= m; ++u) inv_[u] = inv_fact_[u] * fact_[u - 1];
    }

    const LeccParams& params() const { return lp_; }

    Fp entry(std::uint32_t j, std::uint32_t i) const {
        require(j < lp_.length, "LeccRowTable::entry: position out of range");
        require(i < lp_.k, "LeccRowTable::entry: message index out of range");
        if (j < lp_.k) return Fp(j == i ? 1 : 0);
        return prefix(j) * weight(i) * inv_[j - i];
    }

    // Full encoding: the systematic prefix verbatim, parity positions by the
    // barycentric form N(j) * sum_i w(i) m_i / (j - i), O(k) each.
    std::vector<Fp> encode(const std::vector<Fp>& msg) const {
        require(msg.size() == lp_.k, "LeccRowTable::encode: wrong message length");
        std::vector<Fp> out(lp_.length);
        std::copy(msg.begin(), msg.end(), out.begin());
        for (std::uint32_t j = lp_.k; j < lp_.length; ++j) {
            Fp acc(0);
            for (std::uint32_t i = 0; i < lp_.k; ++i) acc += weight(i) * msg[i] * inv_[j - i];
            out[j] = prefix(j) * acc;
        }
        return out;
    }

  private:
    Fp prefix(std::uint32_t j) const { return fact_[j] * inv_fact_[j - lp_.k]; }
    Fp weight(std::uint32_t i) const {
        Fp w = inv_fact_[i] * inv_fact_[lp_.k - 1 - i];
        return ((lp_.k - 1 - i) % 2) ? Fp(0) - w : w;
    }

    LeccParams lp_;
    std::vector<Fp> fact_;
    std::vector<Fp> inv_fact_;
    std::vector<Fp> inv_;
};

inline std::vector<Fp> lecc_encode(const LeccParams& lp, const std::vector<Fp>& msg) {
    return LeccRowTable(lp).encode(msg);
}

namespace detail {

// Gaussian elimination over the field; free variables are pinned to zero.
// Returns nullopt when the system is inconsistent.
inline std::optional<std::vector<Fp>> solve_linear(std::vector<std::vector<Fp>> a,
                                                   std::vector<Fp> b) {
    std::size_t rows = a.size();
    std::size_t cols = rows ? a[0].size() : 0;
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t sel = r;
        while (sel < rows && a[sel][c] == Fp(0)) ++sel;
        if (sel == rows) continue;
        std::swap(a[sel], a[r]);
        std::swap(b[sel], b[r]);
        Fp piv = a[r][c].inv();
        for (std::size_t cc = c; cc < cols; ++cc) a[r][cc] *= piv;
        b[r] *= piv;
        for (std::size_t rr = 0; rr < rows; ++rr) {
            if (rr == r) continue;
            Fp fct = a[rr][c];
            if (fct == Fp(0)) continue;
            for (std::size_t cc = c; cc < cols; ++cc) a[rr][cc] -= fct * a[r][cc];
            b[rr] -= fct * b[r];
        }
        pivots.push_back(c);
        ++r;
    }
    for (std::size_t rr = r; rr < rows; ++rr)
        if (b[rr] != Fp(0)) return std::nullopt;
    std::vector<Fp> z(cols, Fp(0));
    for (std::size_t t = 0; t < pivots.size(); ++t) z[pivots[t]] = b[t];
    return z;
}

} // namespace detail

// Berlekamp-Welch decoding: find a monic error locator E of degree e and a
// Q of degree < k+e with Q(x) = word_j * E(x) at every domain point x = j+1;
// the message polynomial is then Q/E. Any solution of the linear system
// works when the word is within e of a codeword; everything else is caught
// by the exact-division and residual-distance checks. Corrects up to k
// errors (half the distance) in O(length^3).
inline std::optional<std::vector<Fp>> lecc_decode(const LeccParams& lp,
                                                  const std::vector<Fp>& word,
                                                  std::uint32_t max_errors) {
    require(word.size() == lp.length, "lecc_decode: wrong word length");
    require(max_errors <= lp.k, "lecc_decode: beyond the correction radius");
    const std::uint32_t k = lp.k, e = max_errors;
    const std::uint32_t unknowns = (k + e) + e; // Q coefficients, then E_0..E_{e-1}
    std::vector<std::vector<Fp>> a(lp.length, std::vector<Fp>(unknowns, Fp(0)));
    std::vector<Fp> b(lp.length);
    for (std::uint32_t j = 0; j < lp.length; ++j) {
        Fp y(j + 1), pw(1);
        for (std::uint32_t u = 0; u < k + e; ++u) {
            a[j][u] = pw;
            pw *= y;
        }
        pw = Fp(1);
        for (std::uint32_t u = 0; u < e; ++u) {
            a[j][k + e + u] = Fp(0) - word[j] * pw;
            pw *= y;
        }
        b[j] = word[j] * y.pow(e);
    }
    auto sol = detail::solve_linear(std::move(a), std::move(b));
    if (!sol) return std::nullopt;
    Poly q(sol->begin(), sol->begin() + (k + e));
    Poly locator(sol->begin() + (k + e), sol->end());
    locator.push_back(Fp(1)); // monic x^e term
    auto p = poly_divide_exact(q, locator);
    if (!p) return std::nullopt;
    std::vector<Fp> msg(k);
    std::uint32_t mismatches = 0;
    for (std::uint32_t j = 0; j < lp.length; ++j) {
        Fp v = poly_eval(*p, Fp(j + 1));
        if (j < k) msg[j] = v;
        if (v != word[j]) ++mismatches;
    }
    if (mismatches > max_errors) return std::nullopt;
    return msg;
}

} // namespace gmpc
