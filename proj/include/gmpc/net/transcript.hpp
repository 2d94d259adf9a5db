#pragma once

// Event log of a run. One record per event with fields
// (round, type, src, dst, length); serialization is line-delimited text so
// equal transcripts compare byte for byte.

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "gmpc/net/party.hpp"

namespace gmpc {

enum class EventType : std::uint8_t {
    Intent,    // sender handed an envelope to the scheduler
    Deliver,   // envelope delivered to dst
    Block,     // envelope suppressed by the corrupted server
    DdosBlock, // party cut off permanently by the flooding guard
    Abort,     // party left the protocol
    Note,      // protocol milestone (src = party, dst unused)
};

inline const char* event_name(EventType t) {
    switch (t) {
        case EventType::Intent: return "intent";
        case EventType::Deliver: return "deliver";
        case EventType::Block: return "block";
        case EventType::DdosBlock: return "ddos-block";
        case EventType::Abort: return "abort";
        case EventType::Note: return "note";
    }
    return "?";
}

struct Event {
    std::uint32_t round = 0;
    EventType type = EventType::Intent;
    PartyId src;
    PartyId dst;
    std::uint64_t length = 0;
};

class Transcript {
public:
    void log(std::uint32_t round, EventType type, PartyId src, PartyId dst,
             std::uint64_t length) {
        events_.push_back({round, type, src, dst, length});
    }

    const std::vector<Event>& events() const { return events_; }

    std::string serialize() const {
        std::ostringstream out;
        for (const Event& e : events_)
            out << e.round << ' ' << event_name(e.type) << ' ' << e.src.v << ' ' << e.dst.v
                << ' ' << e.length << '\n';
        return out.str();
    }

    // What a single receiver observes: its deliveries, in order. Used to
    // check that blocking and sender abort are indistinguishable.
    std::string receiver_view(PartyId who) const {
        std::ostringstream out;
        for (const Event& e : events_)
            if (e.type == EventType::Deliver && e.dst == who)
                out << e.round << ' ' << e.src.v << ' ' << e.length << '\n';
        return out.str();
    }

    std::uint64_t count(EventType t) const {
        std::uint64_t c = 0;
        for (const Event& e : events_)
            if (e.type == t) ++c;
        return c;
    }

private:
    std::vector<Event> events_;
};

} // namespace gmpc
