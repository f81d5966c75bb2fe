#include "flexgate/goose/subscriber.hpp"

namespace flexgate::goose {

Subscriber::Subscriber(std::shared_ptr<Transport> transport, std::shared_ptr<Clock> clock)
    : transport_(std::move(transport)), clock_(std::move(clock)) {
    transport_->set_receive_callback([this](std::span<const std::uint8_t> b) { on_bytes(b); });
}

Subscriber::~Subscriber() { transport_->set_receive_callback(nullptr); }

void Subscriber::subscribe(const std::string& go_id, StateCallback cb) {
    std::lock_guard lk(mu_);
    subs_[go_id] = Sub{std::move(cb)};
}

void Subscriber::on_bytes(std::span<const std::uint8_t> bytes) {
    auto decoded = decode_frame(bytes);
    StateCallback cb;
    GooseFrame frame;
    {
        std::lock_guard lk(mu_);
        ++stats_.frames_rx;
        if (!decoded) {
            ++stats_.decode_errors;
            return;
        }
        frame = std::move(decoded).take();
        auto it = subs_.find(frame.go_id);
        if (it == subs_.end()) return;
        Sub& s = it->second;
        bool fresh = !s.seen || frame.st_num > s.last_st ||
                     (frame.st_num == s.last_st && frame.sq_num > s.last_sq);
        if (!fresh) {
            ++stats_.suppressed;
            return;
        }
        bool new_state = !s.seen || frame.st_num > s.last_st;
        s.seen = true;
        s.last_st = frame.st_num;
        s.last_sq = frame.sq_num;
        s.last_rx_us = clock_->now_us();
        s.last_ttl_ms = frame.ttl_ms;
        if (!new_state) return;
        ++stats_.delivered;
        cb = s.cb;
    }
    // Callback without the lock; per-source ordering is preserved because the
    // transport delivers serially.
    if (cb) cb(frame);
}

std::vector<std::string> Subscriber::check_stale(std::uint64_t now_us) const {
    std::lock_guard lk(mu_);
    std::vector<std::string> stale;
    for (const auto& [go_id, s] : subs_) {
        if (!s.seen) continue;
        if (now_us > s.last_rx_us + std::uint64_t{s.last_ttl_ms} * 1000) {
            stale.push_back(go_id);
        }
    }
    return stale;
}

SubscriberStats Subscriber::stats() const {
    std::lock_guard lk(mu_);
    return stats_;
}

}  // namespace flexgate::goose
