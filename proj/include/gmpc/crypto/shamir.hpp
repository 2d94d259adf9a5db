#pragma once

// Threshold secret sharing: a degree-t polynomial with f(0) = secret,
// share j is f(j) for evaluation points 1..n_s. Any t+1 shares reconstruct;
// any t shares are uniform and carry nothing about the secret.

#include <vector>

#include "gmpc/crypto/poly.hpp"
#include "gmpc/field.hpp"
#include "gmpc/rng.hpp"
#include "gmpc/serialize.hpp"

namespace gmpc {

struct Share {
    std::uint32_t index = 0; // evaluation point, 1-based holder index
    Fp value;
};

// Ordered shares with holder indices; the wire format of one party's slice
// of a shared value is its Share entries for each packed field element.
using ShareVector = std::vector<Share>;

inline ShareVector shamir_share(Fp secret, std::uint32_t n_s, std::uint32_t t, Rng& rng) {
    require(t < n_s, "shamir_share: need t < n_s");
    Poly f(t + 1);
    f[0] = secret;
    for (std::uint32_t i = 1; i <= t; ++i) f[i] = Fp::random(rng);
    ShareVector out(n_s);
    for (std::uint32_t j = 1; j <= n_s; ++j) out[j - 1] = {j, poly_eval(f, Fp(j))};
    return out;
}

inline Fp shamir_recon(const ShareVector& shares, std::uint32_t t) {
    require(shares.size() >= t + 1, "shamir_recon: not enough shares");
    // Lagrange interpolation at x = 0 over the first t+1 shares.
    Fp acc(0);
    for (std::uint32_t i = 0; i <= t; ++i) {
        Fp num(1), den(1);
        for (std::uint32_t j = 0; j <= t; ++j) {
            if (j == i) continue;
            num *= Fp(shares[j].index);
            den *= Fp(shares[j].index) - Fp(shares[i].index);
        }
        acc += shares[i].value * num * den.inv();
    }
    return acc;
}

// Byte-string sharing: pack into field elements, share element-wise. Holder
// j's share is the vector of its per-element shares, serialized.
inline std::vector<Bytes> shamir_share_bytes(const Bytes& data, std::uint32_t n_s,
                                             std::uint32_t t, Rng& rng) {
    std::vector<Fp> elems = pack_bytes(data);
    std::vector<Writer> per_holder(n_s);
    for (auto& w : per_holder) w.u32(std::uint32_t(elems.size()));
    for (Fp e : elems) {
        ShareVector sh = shamir_share(e, n_s, t, rng);
        for (std::uint32_t j = 0; j < n_s; ++j) per_holder[j].fp(sh[j].value);
    }
    std::vector<Bytes> out;
    out.reserve(n_s);
    for (auto& w : per_holder) out.push_back(w.take());
    return out;
}

inline Bytes shamir_recon_bytes(const std::vector<std::pair<std::uint32_t, Bytes>>& holder_shares,
                                std::uint32_t t) {
    require(holder_shares.size() >= t + 1, "shamir_recon_bytes: not enough shares");
    std::vector<Reader> readers;
    readers.reserve(holder_shares.size());
    for (auto& [idx, b] : holder_shares) readers.emplace_back(b);
    std::uint32_t n_elems = 0;
    for (auto& r : readers) n_elems = r.u32();
    std::vector<Fp> elems(n_elems);
    for (std::uint32_t e = 0; e < n_elems; ++e) {
        ShareVector sv;
        for (std::size_t h = 0; h < readers.size(); ++h)
            sv.push_back({holder_shares[h].first, readers[h].fp()});
        elems[e] = shamir_recon(sv, t);
    }
    return unpack_bytes(elems);
}

} // namespace gmpc
