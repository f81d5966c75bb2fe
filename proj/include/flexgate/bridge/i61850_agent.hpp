#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "flexgate/bridge/model_link.hpp"
#include "flexgate/broker/store.hpp"
#include "flexgate/common/result.hpp"
#include "flexgate/model/object_reference.hpp"
#include "flexgate/model/value.hpp"

namespace flexgate::bridge {

struct I61850Config {
    std::vector<std::string> datasets;  // model datasets mirrored into the broker
    std::string entity_type = "Device61850";
};

// Bidirectional bridge between a device model and the context broker. Model
// reports become entity updates; broker changes to command attributes
// ("_setMag" / "_ctlVal") become model writes. Measurement attributes never
// carry those suffixes, so propagation cannot loop.
class I61850Agent {
public:
    I61850Agent(broker::ContextStore& store, ModelLink& link, I61850Config cfg);
    ~I61850Agent();

    I61850Agent(const I61850Agent&) = delete;
    I61850Agent& operator=(const I61850Agent&) = delete;

    // Performs the initial model -> broker sync, then wires both directions.
    Result<void, LinkError> start();
    void stop();

    std::uint64_t command_writes() const { return command_writes_.load(); }
    std::uint64_t command_errors() const { return command_errors_.load(); }

private:
    void push_snapshot(const std::vector<model::ObjectReference>& members,
                       const std::vector<model::DataValue>& values);
    void on_broker_change(const broker::Notification& n);
    Result<model::ValueKind, LinkError> kind_for(const model::ObjectReference& ref);

    broker::ContextStore& store_;
    ModelLink& link_;
    I61850Config cfg_;
    std::string sub_id_;
    bool running_ = false;
    std::mutex kinds_mu_;
    std::map<std::string, model::ValueKind> kinds_;
    std::atomic<std::uint64_t> command_writes_{0};
    std::atomic<std::uint64_t> command_errors_{0};
};

}  // namespace flexgate::bridge
