#pragma once

#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

namespace gmpc {

using Bytes = std::vector<std::uint8_t>;

inline Bytes to_bytes(std::string_view s) {
    return Bytes(s.begin(), s.end());
}

inline std::string to_string(const Bytes& b) {
    return std::string(b.begin(), b.end());
}

inline std::string hex(const Bytes& b) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(b.size() * 2);
    for (std::uint8_t c : b) {
        out.push_back(digits[c >> 4]);
        out.push_back(digits[c & 0xf]);
    }
    return out;
}

inline Bytes operator+(Bytes a, const Bytes& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

// XOR of equal-length byte strings; used for coin-toss combination.
inline Bytes xor_bytes(const Bytes& a, const Bytes& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("xor_bytes: length mismatch");
    Bytes out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] ^ b[i];
    return out;
}

// Contract check for caller errors (misuse of the library API, not runtime
// protocol behaviour; protocol-level failures are modelled as abort states).
inline void require(bool cond, const char* what) {
    if (!cond) throw std::invalid_argument(what);
}

inline std::uint32_t ceil_log2(std::uint64_t x) {
    std::uint32_t k = 0;
    while ((1ull << k) < x) ++k;
    return k;
}

inline std::uint64_t next_pow2(std::uint64_t x) {
    std::uint64_t p = 1;
    while (p < x) p <<= 1;
    return p;
}

} // namespace gmpc
