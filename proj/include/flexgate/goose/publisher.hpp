#pragma once

#include <atomic>
#include <condition_variable>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>

#include "flexgate/goose/frame.hpp"
#include "flexgate/goose/schedule.hpp"
#include "flexgate/goose/transport.hpp"

namespace flexgate::goose {

struct PublisherConfig {
    std::uint16_t app_id = 1;
    std::string go_id;
    RetransmitSchedule schedule = RetransmitSchedule::standard();
};

enum class PublishError : std::uint8_t { BadFrame, TransportDown, NotStarted };

const char* to_string(PublishError e);

// Publisher side of the event bus. A state change bumps stNum, resets sqNum
// to 0 and restarts the retransmission ladder; heartbeat_tick() emits the
// scheduled repeats when their deadline has passed.
class Publisher {
public:
    Publisher(std::shared_ptr<Transport> transport, PublisherConfig cfg);

    Result<GooseFrame, PublishError> publish_state_change(std::vector<DataValue> values,
                                                          std::uint64_t now_us);

    // Emits at most one due retransmission; returns it, or nullopt when none
    // is due. Call repeatedly to catch up after a long pause.
    std::optional<GooseFrame> heartbeat_tick(std::uint64_t now_us);

    std::optional<std::uint64_t> next_deadline_us() const;
    std::uint32_t st_num() const;
    std::uint32_t sq_num() const;
    const PublisherConfig& config() const { return cfg_; }

private:
    GooseFrame make_frame(std::uint64_t now_us) const;

    std::shared_ptr<Transport> transport_;
    PublisherConfig cfg_;
    mutable std::mutex mu_;
    std::vector<DataValue> values_;
    std::uint32_t st_num_ = 0;
    std::uint32_t sq_num_ = 0;
    std::uint64_t next_deadline_us_ = 0;
    bool active_ = false;
};

// Wall-clock driver for a Publisher: a background thread sleeps until the
// next retransmission deadline and fires heartbeat_tick. notify() wakes it
// after a state change re-arms the ladder.
class AutoRetransmitter {
public:
    explicit AutoRetransmitter(Publisher& pub);
    ~AutoRetransmitter();

    void notify();
    void stop();

private:
    void loop();

    Publisher& pub_;
    std::mutex mu_;
    std::condition_variable cv_;
    std::atomic<bool> stop_{false};
    std::thread thread_;
};

}  // namespace flexgate::goose
