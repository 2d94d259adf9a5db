#pragma once

// Deterministic, forkable randomness. Every run hangs off one root seed;
// independent streams are derived by hashing (parent key, label) so results
// do not depend on the order in which parties consume randomness.

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "gmpc/common.hpp"
#include "gmpc/sha256.hpp"

namespace gmpc {

class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        Bytes key(8);
        for (int i = 0; i < 8; ++i) key[i] = std::uint8_t(seed >> (8 * i));
        init(tagged_hash("rng-root", key));
    }

    explicit Rng(const Digest& key) { init(key); }

    // Derived stream: deterministic in (this stream's key, label), and
    // independent of how much randomness the parent has already produced.
    Rng fork(std::string_view label) const {
        Bytes data(key_.begin(), key_.end());
        data.insert(data.end(), label.begin(), label.end());
        return Rng(tagged_hash("rng-fork", data));
    }

    Rng fork(std::string_view label, std::uint64_t index) const {
        std::string l(label);
        l += '#';
        l += std::to_string(index);
        return fork(l);
    }

    std::uint64_t next_u64() {
        // xoshiro256** 1.0
        std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Unbiased value in [0, bound) via rejection.
    std::uint64_t below(std::uint64_t bound) {
        require(bound > 0, "Rng::below: bound must be positive");
        std::uint64_t limit = ~std::uint64_t(0) - (~std::uint64_t(0) % bound);
        for (;;) {
            std::uint64_t v = next_u64();
            if (v < limit) return v % bound;
        }
    }

    bool bit() { return (next_u64() & 1) != 0; }

    double unit() { // [0,1), 53-bit resolution
        return double(next_u64() >> 11) * 0x1.0p-53;
    }

    Bytes bytes(std::size_t len) {
        Bytes out(len);
        std::size_t i = 0;
        while (i < len) {
            std::uint64_t v = next_u64();
            for (int k = 0; k < 8 && i < len; ++k, ++i) out[i] = std::uint8_t(v >> (8 * k));
        }
        return out;
    }

    // k distinct values from [0, n), order of first draw preserved.
    std::vector<std::uint32_t> sample_distinct(std::size_t k, std::uint64_t n) {
        require(k <= n, "Rng::sample_distinct: k > n");
        std::vector<std::uint32_t> out;
        out.reserve(k);
        while (out.size() < k) {
            auto v = std::uint32_t(below(n));
            if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
        }
        return out;
    }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i)
            std::swap(v[i - 1], v[below(i)]);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    void init(const Digest& key) {
        key_ = key;
        // Two hash outputs give the 256-bit xoshiro state; all-zero state is
        // impossible since SHA-256 output is never all zeros in practice, but
        // guard anyway.
        Digest d0 = tagged_hash("rng-state0", Bytes(key.begin(), key.end()));
        for (int i = 0; i < 4; ++i) {
            std::uint64_t v = 0;
            for (int b = 0; b < 8; ++b) v |= std::uint64_t(d0[8 * i + b]) << (8 * b);
            s_[i] = v;
        }
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
    }

    Digest key_{};
    std::uint64_t s_[4] = {};
};

} // namespace gmpc
