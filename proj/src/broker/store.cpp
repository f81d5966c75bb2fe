#include "flexgate/broker/store.hpp"

#include <httplib.h>

#include <chrono>
#include <cstdio>
#include <fstream>

namespace flexgate::broker {

const char* to_string(StoreError e) {
    switch (e) {
        case StoreError::NotFound: return "NotFound";
        case StoreError::InvalidEntity: return "InvalidEntity";
        case StoreError::InvalidSubscription: return "InvalidSubscription";
    }
    return "?";
}

bool pattern_matches(const std::string& pattern, const std::string& id) {
    if (!pattern.empty() && pattern.back() == '*') {
        return id.compare(0, pattern.size() - 1, pattern, 0, pattern.size() - 1) == 0;
    }
    return pattern == id;
}

namespace {

bool scalar(const Json& v) {
    return v.is_boolean() || v.is_number() || v.is_string();
}

bool default_post(const std::string& url, const std::string& body) {
    // Split http://host:port/path into client target and path.
    const std::string prefix = "http://";
    if (url.rfind(prefix, 0) != 0) return false;
    auto path_pos = url.find('/', prefix.size());
    std::string host_port = url.substr(0, path_pos);
    std::string path = path_pos == std::string::npos ? "/" : url.substr(path_pos);
    httplib::Client cli(host_port);
    cli.set_connection_timeout(2, 0);
    cli.set_read_timeout(2, 0);
    auto res = cli.Post(path, body, "application/json");
    return res && res->status >= 200 && res->status < 300;
}

}  // namespace

Json entity_to_json(const Entity& e, bool with_metadata) {
    Json j;
    j["id"] = e.id;
    j["type"] = e.type;
    for (const auto& [name, attr] : e.attrs) {
        Json a;
        a["value"] = attr.value;
        a["type"] = attr.type;
        if (with_metadata) a["timestampUs"] = attr.timestamp_us;
        j[name] = std::move(a);
    }
    return j;
}

Result<Entity, StoreError> entity_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string() || !j.contains("type") ||
        !j["type"].is_string()) {
        return StoreError::InvalidEntity;
    }
    Entity e;
    e.id = j["id"].get<std::string>();
    e.type = j["type"].get<std::string>();
    if (e.id.empty()) return StoreError::InvalidEntity;
    for (const auto& [key, val] : j.items()) {
        if (key == "id" || key == "type") continue;
        if (!val.is_object() || !val.contains("value") || !scalar(val["value"])) {
            return StoreError::InvalidEntity;
        }
        Attribute a;
        a.value = val["value"];
        a.type = val.contains("type") && val["type"].is_string()
                     ? val["type"].get<std::string>()
                     : std::string{};
        if (val.contains("timestampUs") && val["timestampUs"].is_number_unsigned()) {
            a.timestamp_us = val["timestampUs"].get<std::uint64_t>();
        }
        e.attrs.emplace(key, std::move(a));
    }
    return e;
}

Result<std::map<std::string, Attribute>, StoreError> attrs_from_json(const Json& j) {
    if (!j.is_object()) return StoreError::InvalidEntity;
    std::map<std::string, Attribute> out;
    for (const auto& [key, val] : j.items()) {
        if (!val.is_object() || !val.contains("value") || !scalar(val["value"])) {
            return StoreError::InvalidEntity;
        }
        Attribute a;
        a.value = val["value"];
        a.type = val.contains("type") && val["type"].is_string()
                     ? val["type"].get<std::string>()
                     : std::string{};
        out.emplace(key, std::move(a));
    }
    return out;
}

ContextStore::ContextStore(std::shared_ptr<Clock> clock, std::string snapshot_path)
    : clock_(std::move(clock)), snapshot_path_(std::move(snapshot_path)), poster_(default_post) {
    if (!snapshot_path_.empty()) {
        load_snapshot();
        snapshotter_ = std::thread([this] { snapshot_loop(); });
    }
    worker_ = std::thread([this] { worker_loop(); });
}

ContextStore::~ContextStore() {
    {
        std::lock_guard lk(q_mu_);
        q_stop_ = true;
    }
    q_cv_.notify_all();
    if (worker_.joinable()) worker_.join();
    if (!snapshot_path_.empty()) {
        {
            std::lock_guard lk(snap_mu_);
            snap_stop_ = true;
        }
        snap_cv_.notify_all();
        if (snapshotter_.joinable()) snapshotter_.join();
        write_snapshot_locked_copy();
    }
}

Result<void, StoreError> ContextStore::upsert(const Entity& entity) {
    if (entity.id.empty()) return StoreError::InvalidEntity;
    std::map<std::string, Attribute> changed;
    {
        std::lock_guard lk(mu_);
        auto [it, inserted] = entities_.try_emplace(entity.id);
        Entity& stored = it->second;
        if (inserted) {
            stored.id = entity.id;
        }
        stored.type = entity.type;
        for (const auto& [name, attr] : entity.attrs) {
            auto cur = stored.attrs.find(name);
            if (cur != stored.attrs.end() && cur->second == attr) continue;
            Attribute next = attr;
            std::uint64_t now = clock_->now_us();
            std::uint64_t prev = cur != stored.attrs.end() ? cur->second.timestamp_us : 0;
            next.timestamp_us = std::max(now, prev);
            stored.attrs[name] = next;
            changed.emplace(name, next);
        }
    }
    if (!changed.empty()) apply_changes(entity.id, entity.type, changed);
    return {};
}

Result<void, StoreError> ContextStore::update_attrs(
    const std::string& id, const std::map<std::string, Attribute>& attrs) {
    std::map<std::string, Attribute> changed;
    std::string type;
    {
        std::lock_guard lk(mu_);
        auto it = entities_.find(id);
        if (it == entities_.end()) return StoreError::NotFound;
        Entity& stored = it->second;
        type = stored.type;
        for (const auto& [name, attr] : attrs) {
            auto cur = stored.attrs.find(name);
            if (cur != stored.attrs.end() && cur->second == attr) continue;
            Attribute next = attr;
            std::uint64_t now = clock_->now_us();
            std::uint64_t prev = cur != stored.attrs.end() ? cur->second.timestamp_us : 0;
            next.timestamp_us = std::max(now, prev);
            stored.attrs[name] = next;
            changed.emplace(name, next);
        }
    }
    if (!changed.empty()) apply_changes(id, type, changed);
    return {};
}

Result<Entity, StoreError> ContextStore::get(const std::string& id) const {
    std::lock_guard lk(mu_);
    auto it = entities_.find(id);
    if (it == entities_.end()) return StoreError::NotFound;
    return it->second;
}

std::vector<Entity> ContextStore::query_type(const std::string& type) const {
    std::lock_guard lk(mu_);
    std::vector<Entity> out;
    for (const auto& [id, e] : entities_) {
        (void)id;
        if (e.type == type) out.push_back(e);
    }
    return out;
}

std::size_t ContextStore::entity_count() const {
    std::lock_guard lk(mu_);
    return entities_.size();
}

Result<std::string, StoreError> ContextStore::create_subscription(Subscription sub) {
    if (sub.entity_id_pattern.empty() || sub.notify_url.rfind("http://", 0) != 0) {
        return StoreError::InvalidSubscription;
    }
    std::lock_guard lk(mu_);
    sub.id = "sub" + std::to_string(next_sub_++);
    std::string id = sub.id;
    subs_.push_back(SubEntry{std::move(sub), nullptr});
    return id;
}

std::string ContextStore::subscribe_callback(std::string entity_id_pattern,
                                             std::vector<std::string> watched_attrs,
                                             NotifyCallback cb) {
    std::lock_guard lk(mu_);
    Subscription sub;
    sub.id = "sub" + std::to_string(next_sub_++);
    sub.entity_id_pattern = std::move(entity_id_pattern);
    sub.watched_attrs = std::move(watched_attrs);
    std::string id = sub.id;
    subs_.push_back(SubEntry{std::move(sub), std::move(cb)});
    return id;
}

void ContextStore::remove_subscription(const std::string& id) {
    std::lock_guard lk(mu_);
    std::erase_if(subs_, [&](const SubEntry& e) { return e.sub.id == id; });
}

void ContextStore::set_http_poster(HttpPoster poster) {
    std::lock_guard lk(mu_);
    poster_ = std::move(poster);
}

void ContextStore::apply_changes(const std::string& id, const std::string& type,
                                 const std::map<std::string, Attribute>& changed) {
    {
        std::lock_guard lk(snap_mu_);
        dirty_ = true;
    }
    snap_cv_.notify_all();

    std::vector<std::pair<SubEntry, Notification>> hits;
    {
        std::lock_guard lk(mu_);
        for (const auto& entry : subs_) {
            if (!pattern_matches(entry.sub.entity_id_pattern, id)) continue;
            Notification n;
            n.subscription_id = entry.sub.id;
            n.changes.id = id;
            n.changes.type = type;
            if (entry.sub.watched_attrs.empty()) {
                n.changes.attrs = changed;
            } else {
                for (const auto& w : entry.sub.watched_attrs) {
                    auto it = changed.find(w);
                    if (it != changed.end()) n.changes.attrs.emplace(*it);
                }
            }
            if (n.changes.attrs.empty()) continue;
            hits.emplace_back(entry, std::move(n));
        }
    }
    if (hits.empty()) return;
    {
        std::lock_guard lk(q_mu_);
        for (auto& h : hits) queue_.push_back(std::move(h));
    }
    q_cv_.notify_all();
}

void ContextStore::worker_loop() {
    for (;;) {
        std::pair<SubEntry, Notification> item;
        {
            std::unique_lock lk(q_mu_);
            q_cv_.wait(lk, [&] { return q_stop_ || !queue_.empty(); });
            if (queue_.empty()) {
                if (q_stop_) return;
                continue;
            }
            item = std::move(queue_.front());
            queue_.pop_front();
            q_busy_ = true;
        }
        const SubEntry& entry = item.first;
        const Notification& n = item.second;
        bool delivered = false;
        if (entry.cb) {
            entry.cb(n);
            delivered = true;
        } else {
            Json body;
            body["subscriptionId"] = n.subscription_id;
            body["data"] = Json::array({entity_to_json(n.changes, true)});
            std::string payload = body.dump();
            HttpPoster poster;
            {
                std::lock_guard lk(mu_);
                poster = poster_;
            }
            for (int attempt = 0; attempt < 3 && !delivered; ++attempt) {
                delivered = poster && poster(entry.sub.notify_url, payload);
            }
        }
        if (delivered) {
            notifications_sent_.fetch_add(1);
        } else {
            notifications_dropped_.fetch_add(1);
            std::fprintf(stderr, "[broker] notification to %s dropped after 3 attempts\n",
                         entry.sub.notify_url.c_str());
        }
        {
            std::lock_guard lk(q_mu_);
            q_busy_ = false;
        }
        q_drained_.notify_all();
    }
}

void ContextStore::flush_notifications() {
    std::unique_lock lk(q_mu_);
    q_drained_.wait(lk, [&] { return queue_.empty() && !q_busy_; });
}

bool ContextStore::write_snapshot_locked_copy() {
    Json j = Json::array();
    {
        std::lock_guard lk(mu_);
        for (const auto& [id, e] : entities_) {
            (void)id;
            j.push_back(entity_to_json(e, true));
        }
    }
    std::string tmp = snapshot_path_ + ".tmp";
    {
        std::ofstream f(tmp, std::ios::trunc);
        if (!f) return false;
        f << j.dump(2) << "\n";
        if (!f) return false;
    }
    return std::rename(tmp.c_str(), snapshot_path_.c_str()) == 0;
}

Result<void, StoreError> ContextStore::flush_snapshot() {
    if (snapshot_path_.empty()) return {};
    if (!write_snapshot_locked_copy()) return StoreError::InvalidEntity;
    return {};
}

void ContextStore::load_snapshot() {
    std::ifstream f(snapshot_path_);
    if (!f) return;
    Json j = Json::parse(f, nullptr, false);
    if (!j.is_array()) return;
    std::lock_guard lk(mu_);
    for (const auto& je : j) {
        auto e = entity_from_json(je);
        if (!e) continue;
        entities_[e.value().id] = std::move(e).take();
    }
}

void ContextStore::snapshot_loop() {
    std::unique_lock lk(snap_mu_);
    for (;;) {
        snap_cv_.wait(lk, [&] { return snap_stop_ || dirty_; });
        if (snap_stop_) return;
        dirty_ = false;
        lk.unlock();
        write_snapshot_locked_copy();
        std::this_thread::sleep_for(std::chrono::seconds(1));
        lk.lock();
    }
}

}  // namespace flexgate::broker
