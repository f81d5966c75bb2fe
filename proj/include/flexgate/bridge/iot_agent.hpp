#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "flexgate/broker/store.hpp"
#include "flexgate/common/result.hpp"

namespace flexgate::bridge {

enum class DeviceKind : std::uint8_t { Measurement, CommandAck };

// Canonical device JSON: {"deviceId":..., "kind":..., "readings":{...},
// "timestampUs":...}. Readings are numbers or booleans.
struct DeviceMessage {
    std::string device_id;
    DeviceKind kind = DeviceKind::Measurement;
    std::map<std::string, broker::Json> readings;
    std::uint64_t timestamp_us = 0;
};

struct DeviceConfig {
    std::string device_id;
    std::string device_type = "IoTDevice";
    std::string endpoint_url;                 // command target, http://...
    std::set<std::string> commandable;        // attrs accepted by command()
    std::map<std::string, std::string> units; // reading name -> unit metadata
};

enum class IotAgentError : std::uint8_t {
    UnknownDevice,
    InvalidMessage,
    NotCommandable,
    DeviceUnreachable,
};

const char* to_string(IotAgentError e);

broker::Json device_message_to_json(const DeviceMessage& msg);
Result<DeviceMessage, IotAgentError> device_message_from_json(const broker::Json& j);

// Translates device JSON into broker entities and broker command-attribute
// changes into device commands. Command and reading attribute names must be
// disjoint per device; ingest enforces this to keep echoes impossible.
class IotAgent {
public:
    using HttpPoster = broker::ContextStore::HttpPoster;

    IotAgent(broker::ContextStore& store, std::vector<DeviceConfig> devices);
    ~IotAgent();

    IotAgent(const IotAgent&) = delete;
    IotAgent& operator=(const IotAgent&) = delete;

    Result<void, IotAgentError> ingest(const DeviceMessage& msg);
    Result<void, IotAgentError> command(const std::string& entity_id, const std::string& attr,
                                        const broker::Json& value);

    // Watches the broker for commandable attribute changes on the configured
    // devices and forwards each as a device command.
    void attach();
    void detach();

    void set_http_poster(HttpPoster poster);
    std::uint64_t messages_dropped() const { return dropped_.load(); }

private:
    const DeviceConfig* find_device(const std::string& device_id) const;
    Result<void, IotAgentError> post_command(const DeviceConfig& cfg, const std::string& attr,
                                             const broker::Json& value);

    broker::ContextStore& store_;
    std::vector<DeviceConfig> devices_;
    HttpPoster poster_;
    std::vector<std::string> sub_ids_;
    std::atomic<std::uint64_t> dropped_{0};
};

}  // namespace flexgate::bridge
