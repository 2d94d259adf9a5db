#pragma once

// Party identities. Id 0 is the server; 1..n are users. Ids above n are
// virtual parties (committees acting as a unit) allocated by protocol
// runtimes; the simulator treats them uniformly and expands their traffic
// into per-member accounting.

#include <cstdint>
#include <functional>

namespace gmpc {

struct PartyId {
    std::uint32_t v = 0;

    constexpr PartyId() = default;
    constexpr explicit PartyId(std::uint32_t value) : v(value) {}

    static constexpr PartyId server() { return PartyId(0); }
    static constexpr PartyId user(std::uint32_t i) { return PartyId(i); } // i in 1..n

    constexpr bool is_server() const { return v == 0; }

    friend constexpr bool operator==(PartyId a, PartyId b) { return a.v == b.v; }
    friend constexpr bool operator!=(PartyId a, PartyId b) { return a.v != b.v; }
    friend constexpr bool operator<(PartyId a, PartyId b) { return a.v < b.v; }
};

} // namespace gmpc

template <>
struct std::hash<gmpc::PartyId> {
    std::size_t operator()(gmpc::PartyId p) const noexcept {
        return std::hash<std::uint32_t>()(p.v);
    }
};
