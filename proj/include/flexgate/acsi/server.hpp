#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "flexgate/acsi/protocol.hpp"
#include "flexgate/common/clock.hpp"
#include "flexgate/common/result.hpp"
#include "flexgate/model/server_model.hpp"

namespace flexgate::acsi {

struct AcsiServerConfig {
    std::string bind_addr = "127.0.0.1";
    std::uint16_t port = kDefaultPort;  // 0 = ephemeral
};

enum class ServerError : std::uint8_t { BindFailure, AlreadyRunning };

// TCP front-end for a ServerModel: directory, read, write (controller
// channel) and report subscriptions, one thread per connection.
class AcsiServer {
public:
    explicit AcsiServer(std::shared_ptr<model::ServerModel> model, AcsiServerConfig cfg = {},
                        std::shared_ptr<Clock> clock = wall_clock());
    ~AcsiServer();

    AcsiServer(const AcsiServer&) = delete;
    AcsiServer& operator=(const AcsiServer&) = delete;

    Result<void, ServerError> start();
    void stop();

    std::uint16_t port() const { return bound_port_; }

private:
    struct Connection;

    void accept_loop();
    void connection_loop(const std::shared_ptr<Connection>& conn);
    void teardown(const std::shared_ptr<Connection>& conn);
    Envelope handle(const std::shared_ptr<Connection>& conn, const Envelope& req);
    Envelope handle_directory(const Envelope& req);
    Envelope handle_read(const Envelope& req);
    Envelope handle_write(const Envelope& req);
    Envelope handle_subscribe(const std::shared_ptr<Connection>& conn, const Envelope& req);
    void push_report(const std::shared_ptr<Connection>& conn, const std::string& dataset);

    std::shared_ptr<model::ServerModel> model_;
    AcsiServerConfig cfg_;
    std::shared_ptr<Clock> clock_;
    int listen_fd_ = -1;
    std::uint16_t bound_port_ = 0;
    std::atomic<bool> running_{false};
    std::atomic<bool> stopping_{false};
    std::thread accept_thread_;
    std::mutex conns_mu_;
    std::vector<std::shared_ptr<Connection>> conns_;
};

}  // namespace flexgate::acsi
