#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "flexgate/common/clock.hpp"
#include "flexgate/common/result.hpp"

namespace flexgate::broker {

using Json = nlohmann::json;

struct Attribute {
    Json value;  // scalar: bool, number or string
    std::string type;
    std::uint64_t timestamp_us = 0;

    friend bool operator==(const Attribute& a, const Attribute& b) {
        return a.value == b.value && a.type == b.type;
    }
};

struct Entity {
    std::string id;
    std::string type;
    std::map<std::string, Attribute> attrs;
};

struct Subscription {
    std::string id;
    std::string entity_id_pattern;           // exact id or prefix ending in '*'
    std::vector<std::string> watched_attrs;  // empty = all
    std::string notify_url;                  // empty when callback-based
};

struct Notification {
    std::string subscription_id;
    Entity changes;  // id, type and only the matching changed attributes
};

enum class StoreError : std::uint8_t { NotFound, InvalidEntity, InvalidSubscription };

const char* to_string(StoreError e);

bool pattern_matches(const std::string& pattern, const std::string& id);

// Entity store with change-driven notifications. Mutations are serialized;
// notification delivery runs on a worker thread, order-preserving per
// subscription. With a snapshot path set, the store persists itself
// atomically at most once per second and reloads on construction.
class ContextStore {
public:
    using NotifyCallback = std::function<void(const Notification&)>;
    // Delivery hook for HTTP notifications; returns success. Injectable for
    // tests; the default posts JSON with cpp-httplib.
    using HttpPoster = std::function<bool(const std::string& url, const std::string& body)>;

    explicit ContextStore(std::shared_ptr<Clock> clock = wall_clock(),
                          std::string snapshot_path = "");
    ~ContextStore();

    ContextStore(const ContextStore&) = delete;
    ContextStore& operator=(const ContextStore&) = delete;

    Result<void, StoreError> upsert(const Entity& entity);
    Result<void, StoreError> update_attrs(const std::string& id,
                                          const std::map<std::string, Attribute>& attrs);
    Result<Entity, StoreError> get(const std::string& id) const;
    std::vector<Entity> query_type(const std::string& type) const;
    std::size_t entity_count() const;

    Result<std::string, StoreError> create_subscription(Subscription sub);
    std::string subscribe_callback(std::string entity_id_pattern,
                                   std::vector<std::string> watched_attrs, NotifyCallback cb);
    // Stops future notifications for the subscription; pair with
    // flush_notifications() before releasing callback targets.
    void remove_subscription(const std::string& id);

    void set_http_poster(HttpPoster poster);

    // Blocks until the notification queue has drained.
    void flush_notifications();
    // Writes the snapshot now (no-op without a snapshot path).
    Result<void, StoreError> flush_snapshot();

    std::uint64_t notifications_sent() const { return notifications_sent_.load(); }
    std::uint64_t notifications_dropped() const { return notifications_dropped_.load(); }

private:
    struct SubEntry {
        Subscription sub;
        NotifyCallback cb;  // used when notify_url is empty
    };

    void apply_changes(const std::string& id, const std::string& type,
                       const std::map<std::string, Attribute>& changed);
    void worker_loop();
    void snapshot_loop();
    bool write_snapshot_locked_copy();
    void load_snapshot();

    std::shared_ptr<Clock> clock_;
    std::string snapshot_path_;

    mutable std::mutex mu_;
    std::map<std::string, Entity> entities_;
    std::vector<SubEntry> subs_;
    int next_sub_ = 1;

    std::mutex q_mu_;
    std::condition_variable q_cv_;
    std::condition_variable q_drained_;
    std::deque<std::pair<SubEntry, Notification>> queue_;
    bool q_stop_ = false;
    bool q_busy_ = false;
    std::thread worker_;

    std::thread snapshotter_;
    std::condition_variable snap_cv_;
    std::mutex snap_mu_;
    bool dirty_ = false;
    bool snap_stop_ = false;

    HttpPoster poster_;
    std::atomic<std::uint64_t> notifications_sent_{0};
    std::atomic<std::uint64_t> notifications_dropped_{0};
};

// JSON (de)serialization used by the HTTP facade and persistence.
Json entity_to_json(const Entity& e, bool with_metadata);
Result<Entity, StoreError> entity_from_json(const Json& j);
Result<std::map<std::string, Attribute>, StoreError> attrs_from_json(const Json& j);

}  // namespace flexgate::broker
