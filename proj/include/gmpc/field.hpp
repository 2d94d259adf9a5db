#pragma once

// Prime field F_p with p = 2^61 - 1 (Mersenne): large enough that random
// polynomial identities fail with negligible probability at simulation
// scale, small enough for branch-free 64-bit arithmetic.

#include <cstdint>
#include <vector>

#include "gmpc/common.hpp"
#include "gmpc/rng.hpp"

namespace gmpc {

class Fp {
public:
    static constexpr std::uint64_t P = (std::uint64_t(1) << 61) - 1;

    constexpr Fp() = default;
    constexpr explicit Fp(std::uint64_t v) : v_(v % P) {}

    constexpr std::uint64_t value() const { return v_; }

    friend constexpr Fp operator+(Fp a, Fp b) {
        std::uint64_t s = a.v_ + b.v_;
        if (s >= P) s -= P;
        return from_raw(s);
    }

    friend constexpr Fp operator-(Fp a, Fp b) {
        std::uint64_t s = a.v_ + P - b.v_;
        if (s >= P) s -= P;
        return from_raw(s);
    }

    friend constexpr Fp operator*(Fp a, Fp b) {
        unsigned __int128 m = (unsigned __int128)a.v_ * b.v_;
        // Mersenne reduction: split at bit 61 twice.
        std::uint64_t lo = std::uint64_t(m) & P;
        std::uint64_t hi = std::uint64_t(m >> 61);
        std::uint64_t s = lo + (hi & P) + (hi >> 61);
        if (s >= P) s -= P;
        return from_raw(s);
    }

    Fp& operator+=(Fp o) { return *this = *this + o; }
    Fp& operator-=(Fp o) { return *this = *this - o; }
    Fp& operator*=(Fp o) { return *this = *this * o; }

    friend constexpr bool operator==(Fp a, Fp b) { return a.v_ == b.v_; }
    friend constexpr bool operator!=(Fp a, Fp b) { return a.v_ != b.v_; }

    Fp pow(std::uint64_t e) const {
        Fp base = *this, acc(1);
        while (e) {
            if (e & 1) acc *= base;
            base *= base;
            e >>= 1;
        }
        return acc;
    }

    Fp inv() const {
        require(v_ != 0, "Fp::inv: zero has no inverse");
        return pow(P - 2);
    }

    static Fp random(Rng& rng) { return from_raw(rng.below(P)); }

private:
    static constexpr Fp from_raw(std::uint64_t v) {
        Fp f;
        f.v_ = v;
        return f;
    }
    std::uint64_t v_ = 0;
};

// Byte strings <-> field element vectors. Sharing and encoding operate on
// field elements; payloads are packed 7 bytes per element (56 bits < 61)
// with the original length prepended so round-trips are exact.
inline std::vector<Fp> pack_bytes(const Bytes& data) {
    std::vector<Fp> out;
    out.reserve(2 + data.size() / 7);
    out.push_back(Fp(data.size()));
    for (std::size_t i = 0; i < data.size(); i += 7) {
        std::uint64_t v = 0;
        for (std::size_t k = 0; k < 7 && i + k < data.size(); ++k)
            v |= std::uint64_t(data[i + k]) << (8 * k);
        out.push_back(Fp(v));
    }
    return out;
}

inline Bytes unpack_bytes(const std::vector<Fp>& elems) {
    require(!elems.empty(), "unpack_bytes: empty input");
    std::size_t len = elems[0].value();
    require(elems.size() >= 1 + (len + 6) / 7, "unpack_bytes: truncated input");
    Bytes out(len);
    for (std::size_t i = 0; i < len; ++i)
        out[i] = std::uint8_t(elems[1 + i / 7].value() >> (8 * (i % 7)));
    return out;
}

} // namespace gmpc
