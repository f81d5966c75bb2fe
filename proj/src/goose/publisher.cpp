#include "flexgate/goose/publisher.hpp"

#include <chrono>

namespace flexgate::goose {

const char* to_string(PublishError e) {
    switch (e) {
        case PublishError::BadFrame: return "BadFrame";
        case PublishError::TransportDown: return "TransportDown";
        case PublishError::NotStarted: return "NotStarted";
    }
    return "?";
}

Publisher::Publisher(std::shared_ptr<Transport> transport, PublisherConfig cfg)
    : transport_(std::move(transport)), cfg_(std::move(cfg)) {}

GooseFrame Publisher::make_frame(std::uint64_t now_us) const {
    GooseFrame f;
    f.app_id = cfg_.app_id;
    f.go_id = cfg_.go_id;
    f.st_num = st_num_;
    f.sq_num = sq_num_;
    f.timestamp_us = now_us;
    f.ttl_ms = cfg_.schedule.ttl_ms(sq_num_);
    f.entries = values_;
    return f;
}

Result<GooseFrame, PublishError> Publisher::publish_state_change(std::vector<DataValue> values,
                                                                 std::uint64_t now_us) {
    std::lock_guard lk(mu_);
    values_ = std::move(values);
    ++st_num_;
    sq_num_ = 0;
    active_ = true;
    GooseFrame f = make_frame(now_us);
    auto bytes = encode_frame(f);
    if (!bytes) return PublishError::BadFrame;
    if (!transport_->send(bytes.value())) return PublishError::TransportDown;
    next_deadline_us_ = now_us + std::uint64_t{cfg_.schedule.gap_ms(0)} * 1000;
    return f;
}

std::optional<GooseFrame> Publisher::heartbeat_tick(std::uint64_t now_us) {
    std::lock_guard lk(mu_);
    if (!active_ || now_us < next_deadline_us_) return std::nullopt;
    ++sq_num_;
    GooseFrame f = make_frame(now_us);
    auto bytes = encode_frame(f);
    if (!bytes) return std::nullopt;
    transport_->send(bytes.value());
    next_deadline_us_ += std::uint64_t{cfg_.schedule.gap_ms(sq_num_)} * 1000;
    return f;
}

std::optional<std::uint64_t> Publisher::next_deadline_us() const {
    std::lock_guard lk(mu_);
    if (!active_) return std::nullopt;
    return next_deadline_us_;
}

std::uint32_t Publisher::st_num() const {
    std::lock_guard lk(mu_);
    return st_num_;
}

std::uint32_t Publisher::sq_num() const {
    std::lock_guard lk(mu_);
    return sq_num_;
}

AutoRetransmitter::AutoRetransmitter(Publisher& pub) : pub_(pub) {
    thread_ = std::thread([this] { loop(); });
}

AutoRetransmitter::~AutoRetransmitter() { stop(); }

void AutoRetransmitter::notify() { cv_.notify_all(); }

void AutoRetransmitter::stop() {
    stop_.store(true);
    cv_.notify_all();
    if (thread_.joinable()) thread_.join();
}

void AutoRetransmitter::loop() {
    using namespace std::chrono;
    std::unique_lock lk(mu_);
    while (!stop_.load()) {
        auto deadline = pub_.next_deadline_us();
        if (!deadline) {
            cv_.wait_for(lk, milliseconds(20));
            continue;
        }
        auto when = time_point<system_clock>(microseconds(*deadline));
        // Coarse sleep until just before the deadline, then a short spin for
        // sub-millisecond accuracy. A notify (state change) restarts the wait.
        if (cv_.wait_until(lk, when - microseconds(800)) == std::cv_status::no_timeout) {
            continue;
        }
        lk.unlock();
        while (!stop_.load() && system_clock::now() < when) {
            std::this_thread::yield();
        }
        auto now = duration_cast<microseconds>(system_clock::now().time_since_epoch());
        pub_.heartbeat_tick(static_cast<std::uint64_t>(now.count()));
        lk.lock();
    }
}

}  // namespace flexgate::goose
