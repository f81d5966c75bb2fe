#pragma once

#include <memory>
#include <string>
#include <thread>

#include "flexgate/broker/store.hpp"
#include "flexgate/common/result.hpp"

namespace httplib {
class Server;
}

namespace flexgate::broker {

struct BrokerConfig {
    std::string bind = "127.0.0.1";
    int port = 10280;  // 0 picks an ephemeral port
};

// NGSI-v2-style HTTP facade over a ContextStore:
//   POST  /v2/entities              create or update an entity
//   GET   /v2/entities/{id}         fetch one entity
//   PATCH /v2/entities/{id}/attrs   update attributes
//   GET   /v2/entities?type=T       list entities of a type
//   POST  /v2/subscriptions         register a notification target
class BrokerService {
public:
    explicit BrokerService(ContextStore& store, BrokerConfig cfg = {});
    ~BrokerService();

    BrokerService(const BrokerService&) = delete;
    BrokerService& operator=(const BrokerService&) = delete;

    Result<void, std::string> start();
    void stop();

    int port() const { return port_; }
    std::string base_url() const;

private:
    void install_routes();

    ContextStore& store_;
    BrokerConfig cfg_;
    std::unique_ptr<httplib::Server> svr_;
    std::thread thread_;
    int port_ = 0;
};

}  // namespace flexgate::broker
