#pragma once

#include <cstdint>
#include <vector>

namespace flexgate::goose {

// Retransmission ladder after a state change: gaps double from the first
// interval until the heartbeat interval, which then repeats forever. The TTL
// carried by a frame is twice the gap that follows it.
struct RetransmitSchedule {
    std::vector<std::uint32_t> intervals_ms;

    static RetransmitSchedule standard() {
        return RetransmitSchedule{{4, 8, 16, 32, 64, 128, 256, 512, 1000}};
    }

    bool valid() const {
        if (intervals_ms.empty()) return false;
        for (std::size_t i = 1; i < intervals_ms.size(); ++i) {
            if (intervals_ms[i] <= intervals_ms[i - 1]) return false;
        }
        return intervals_ms.front() > 0;
    }

    // Gap following the frame with sequence number sq within its state.
    std::uint32_t gap_ms(std::uint32_t sq) const {
        if (intervals_ms.empty()) return 0;
        std::size_t i = sq < intervals_ms.size() ? sq : intervals_ms.size() - 1;
        return intervals_ms[i];
    }

    std::uint32_t ttl_ms(std::uint32_t sq) const { return 2 * gap_ms(sq); }
};

}  // namespace flexgate::goose
