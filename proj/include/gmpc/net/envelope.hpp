#pragma once

// The unit of communication. The scheduler reveals (src, dst, length) as
// metadata before delivery; payload bytes are opaque to everyone except the
// destination (and the adversary when the sender is corrupted).

#include "gmpc/common.hpp"
#include "gmpc/net/party.hpp"

namespace gmpc {

struct Envelope {
    PartyId src;
    PartyId dst;
    std::uint32_t round = 0;
    Bytes payload;

    std::size_t length() const { return payload.size(); }
};

} // namespace gmpc
