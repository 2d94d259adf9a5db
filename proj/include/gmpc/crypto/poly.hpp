#pragma once

// Dense polynomials over Fp, coefficient order low-to-high. Small-degree
// helper kit shared by the secret-sharing and encoding code; committee sizes
// and code lengths at simulation scale keep everything comfortably O(n^2).

#include <vector>

#include "gmpc/field.hpp"

namespace gmpc {

using Poly = std::vector<Fp>; // empty == zero polynomial

inline Fp poly_eval(const Poly& f, Fp x) {
    Fp acc(0);
    for (std::size_t i = f.size(); i > 0; --i) acc = acc * x + f[i - 1];
    return acc;
}

inline std::size_t poly_deg(const Poly& f) {
    std::size_t d = f.size();
    while (d > 0 && f[d - 1] == Fp(0)) --d;
    return d == 0 ? 0 : d - 1; // zero polynomial reported as degree 0
}

// Unique polynomial of degree < points.size() through the given points.
inline Poly poly_interpolate(const std::vector<std::pair<Fp, Fp>>& points) {
    Poly result;
    Poly base{Fp(1)}; // product of (x - x_j) for processed j
    // Newton-free O(k^2) Lagrange accumulation.
    for (std::size_t i = 0; i < points.size(); ++i) {
        // L_i(x) = prod_{j != i} (x - x_j) / (x_i - x_j)
        Poly num{Fp(1)};
        Fp denom(1);
        for (std::size_t j = 0; j < points.size(); ++j) {
            if (j == i) continue;
            // num *= (x - x_j)
            num.insert(num.begin(), Fp(0));
            for (std::size_t k = 0; k + 1 < num.size(); ++k)
                num[k] -= points[j].first * num[k + 1];
            denom *= points[i].first - points[j].first;
        }
        Fp scale = points[i].second * denom.inv();
        if (result.size() < num.size()) result.resize(num.size(), Fp(0));
        for (std::size_t k = 0; k < num.size(); ++k) result[k] += num[k] * scale;
    }
    (void)base;
    return result;
}

// Quotient of a/b when the division is exact; nullopt when a remainder is
// left (used by the decoder to detect an inconsistent error-locator guess).
inline std::optional<Poly> poly_divide_exact(Poly a, const Poly& b) {
    std::size_t db = poly_deg(b);
    if (b.empty() || (db == 0 && b[0] == Fp(0))) return std::nullopt;
    if (poly_deg(a) < db && !(a.size() == 0)) {
        bool zero = true;
        for (Fp c : a)
            if (c != Fp(0)) zero = false;
        if (zero) return Poly{};
    }
    Poly q(poly_deg(a) >= db ? poly_deg(a) - db + 1 : 0, Fp(0));
    Fp lead_inv = b[db].inv();
    for (std::size_t i = q.size(); i > 0; --i) {
        std::size_t shift = i - 1;
        if (a.size() < shift + db + 1) continue;
        Fp coef = a[shift + db] * lead_inv;
        q[shift] = coef;
        for (std::size_t k = 0; k <= db; ++k) a[shift + k] -= coef * b[k];
    }
    for (Fp c : a)
        if (c != Fp(0)) return std::nullopt;
    return q;
}

} // namespace gmpc
