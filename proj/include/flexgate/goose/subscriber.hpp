#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "flexgate/common/clock.hpp"
#include "flexgate/goose/frame.hpp"
#include "flexgate/goose/transport.hpp"

namespace flexgate::goose {

struct SubscriberStats {
    std::uint64_t frames_rx = 0;
    std::uint64_t decode_errors = 0;
    std::uint64_t suppressed = 0;
    std::uint64_t delivered = 0;
};

// Subscriber side of the event bus. Tracks (stNum, sqNum) per goId, drops
// duplicates and stale frames, invokes the callback once per new state, and
// reports sources whose TTL has lapsed.
class Subscriber {
public:
    using StateCallback = std::function<void(const GooseFrame&)>;

    explicit Subscriber(std::shared_ptr<Transport> transport,
                        std::shared_ptr<Clock> clock = wall_clock());
    ~Subscriber();

    void subscribe(const std::string& go_id, StateCallback cb);

    // goIds whose last frame's TTL has expired by now_us.
    std::vector<std::string> check_stale(std::uint64_t now_us) const;

    SubscriberStats stats() const;

private:
    void on_bytes(std::span<const std::uint8_t> bytes);

    struct Sub {
        StateCallback cb;
        bool seen = false;
        std::uint32_t last_st = 0;
        std::uint32_t last_sq = 0;
        std::uint64_t last_rx_us = 0;
        std::uint32_t last_ttl_ms = 0;
    };

    std::shared_ptr<Transport> transport_;
    std::shared_ptr<Clock> clock_;
    mutable std::mutex mu_;
    std::map<std::string, Sub> subs_;
    SubscriberStats stats_;
};

}  // namespace flexgate::goose
