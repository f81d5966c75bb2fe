#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>

namespace flexgate {

// Time source handing out microseconds since the Unix epoch. Injected
// everywhere a timestamp is taken so simulated runs stay deterministic.
class Clock {
public:
    virtual ~Clock() = default;
    virtual std::uint64_t now_us() = 0;
};

class WallClock final : public Clock {
public:
    std::uint64_t now_us() override {
        using namespace std::chrono;
        return static_cast<std::uint64_t>(
            duration_cast<microseconds>(system_clock::now().time_since_epoch()).count());
    }
};

// Manually advanced clock driving deterministic simulation runs.
class ManualClock final : public Clock {
public:
    explicit ManualClock(std::uint64_t start_us = 0) : t_us_(start_us) {}

    std::uint64_t now_us() override { return t_us_.load(std::memory_order_relaxed); }
    void set_us(std::uint64_t t) { t_us_.store(t, std::memory_order_relaxed); }
    void advance_us(std::uint64_t d) { t_us_.fetch_add(d, std::memory_order_relaxed); }

private:
    std::atomic<std::uint64_t> t_us_;
};

inline std::shared_ptr<Clock> wall_clock() { return std::make_shared<WallClock>(); }

}  // namespace flexgate
