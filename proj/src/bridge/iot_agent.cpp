#include "flexgate/bridge/iot_agent.hpp"

#include <httplib.h>

#include <cstdio>

#include "flexgate/bridge/mapping.hpp"

namespace flexgate::bridge {

namespace {

bool post_json(const std::string& url, const std::string& body) {
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

const char* to_string(IotAgentError e) {
    switch (e) {
        case IotAgentError::UnknownDevice: return "UnknownDevice";
        case IotAgentError::InvalidMessage: return "InvalidMessage";
        case IotAgentError::NotCommandable: return "NotCommandable";
        case IotAgentError::DeviceUnreachable: return "DeviceUnreachable";
    }
    return "?";
}

broker::Json device_message_to_json(const DeviceMessage& msg) {
    broker::Json j;
    j["deviceId"] = msg.device_id;
    j["kind"] = msg.kind == DeviceKind::Measurement ? "Measurement" : "CommandAck";
    j["readings"] = broker::Json::object();
    for (const auto& [name, value] : msg.readings) j["readings"][name] = value;
    j["timestampUs"] = msg.timestamp_us;
    return j;
}

Result<DeviceMessage, IotAgentError> device_message_from_json(const broker::Json& j) {
    if (!j.is_object() || !j.contains("deviceId") || !j["deviceId"].is_string() ||
        !j.contains("kind") || !j["kind"].is_string()) {
        return IotAgentError::InvalidMessage;
    }
    DeviceMessage msg;
    msg.device_id = j["deviceId"].get<std::string>();
    std::string kind = j["kind"].get<std::string>();
    if (kind == "Measurement") {
        msg.kind = DeviceKind::Measurement;
    } else if (kind == "CommandAck") {
        msg.kind = DeviceKind::CommandAck;
    } else {
        return IotAgentError::InvalidMessage;
    }
    if (j.contains("readings")) {
        if (!j["readings"].is_object()) return IotAgentError::InvalidMessage;
        for (const auto& [name, value] : j["readings"].items()) {
            if (!value.is_number() && !value.is_boolean()) return IotAgentError::InvalidMessage;
            msg.readings.emplace(name, value);
        }
    }
    if (j.contains("timestampUs") && j["timestampUs"].is_number_unsigned()) {
        msg.timestamp_us = j["timestampUs"].get<std::uint64_t>();
    }
    return msg;
}

IotAgent::IotAgent(broker::ContextStore& store, std::vector<DeviceConfig> devices)
    : store_(store), devices_(std::move(devices)), poster_(post_json) {}

IotAgent::~IotAgent() { detach(); }

const DeviceConfig* IotAgent::find_device(const std::string& device_id) const {
    for (const auto& d : devices_) {
        if (d.device_id == device_id) return &d;
    }
    return nullptr;
}

Result<void, IotAgentError> IotAgent::ingest(const DeviceMessage& msg) {
    const DeviceConfig* cfg = find_device(msg.device_id);
    if (!cfg) {
        dropped_.fetch_add(1);
        std::fprintf(stderr, "[iot-agent] message from unknown device %s dropped\n",
                     msg.device_id.c_str());
        return IotAgentError::UnknownDevice;
    }
    if (msg.kind == DeviceKind::Measurement && msg.readings.empty()) {
        return IotAgentError::InvalidMessage;
    }
    for (const auto& [name, value] : msg.readings) {
        (void)value;
        if (cfg->commandable.count(name)) return IotAgentError::InvalidMessage;
    }
    broker::Entity e;
    e.id = device_entity_id(msg.device_id);
    e.type = cfg->device_type;
    for (const auto& [name, value] : msg.readings) {
        broker::Attribute a;
        a.value = value;
        auto unit = cfg->units.find(name);
        a.type = unit != cfg->units.end() ? unit->second : std::string{};
        e.attrs.emplace(name, std::move(a));
    }
    if (!e.attrs.empty()) (void)store_.upsert(e);
    return {};
}

Result<void, IotAgentError> IotAgent::post_command(const DeviceConfig& cfg,
                                                   const std::string& attr,
                                                   const broker::Json& value) {
    broker::Json body;
    body["set"] = broker::Json::object();
    body["set"][attr] = value;
    std::string payload = body.dump();
    for (int attempt = 0; attempt < 3; ++attempt) {
        if (poster_ && poster_(cfg.endpoint_url, payload)) return {};
    }
    std::fprintf(stderr, "[iot-agent] device %s unreachable after 3 attempts\n",
                 cfg.device_id.c_str());
    return IotAgentError::DeviceUnreachable;
}

Result<void, IotAgentError> IotAgent::command(const std::string& entity_id,
                                              const std::string& attr,
                                              const broker::Json& value) {
    auto device_id = entity_device_id(entity_id);
    if (!device_id) return IotAgentError::UnknownDevice;
    const DeviceConfig* cfg = find_device(device_id.value());
    if (!cfg) return IotAgentError::UnknownDevice;
    if (!cfg->commandable.count(attr)) return IotAgentError::NotCommandable;
    return post_command(*cfg, attr, value);
}

void IotAgent::attach() {
    if (!sub_ids_.empty()) return;
    for (const auto& d : devices_) {
        if (d.commandable.empty()) continue;
        std::vector<std::string> watched(d.commandable.begin(), d.commandable.end());
        sub_ids_.push_back(store_.subscribe_callback(
            device_entity_id(d.device_id), std::move(watched),
            [this](const broker::Notification& n) {
                for (const auto& [attr, attribute] : n.changes.attrs) {
                    (void)command(n.changes.id, attr, attribute.value);
                }
            }));
    }
}

void IotAgent::detach() {
    if (sub_ids_.empty()) return;
    for (const auto& id : sub_ids_) store_.remove_subscription(id);
    sub_ids_.clear();
    store_.flush_notifications();
}

void IotAgent::set_http_poster(HttpPoster poster) { poster_ = std::move(poster); }

}  // namespace flexgate::bridge
