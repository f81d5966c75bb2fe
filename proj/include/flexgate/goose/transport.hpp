#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "flexgate/common/result.hpp"

namespace flexgate::goose {

// Datagram fan-out abstraction under the publish/subscribe layer.
class Transport {
public:
    using ReceiveFn = std::function<void(std::span<const std::uint8_t>)>;

    virtual ~Transport() = default;
    virtual bool send(std::span<const std::uint8_t> bytes) = 0;
    virtual void set_receive_callback(ReceiveFn fn) = 0;
};

// Synchronous in-process hub: send() delivers to every other endpoint before
// returning. Keeps simulated runs deterministic.
class InProcBus {
public:
    std::shared_ptr<Transport> endpoint();

private:
    class Endpoint;
    struct Hub {
        std::mutex mu;
        std::vector<std::weak_ptr<Endpoint>> endpoints;
    };
    std::shared_ptr<Hub> hub_ = std::make_shared<Hub>();
};

struct UdpMulticastConfig {
    std::string group = "239.61.8.50";
    std::uint16_t port = 10285;
    std::string interface_addr = "127.0.0.1";
};

enum class TransportError : std::uint8_t { SocketFailure, BindFailure, JoinFailure };

const char* to_string(TransportError e);

// IPv4 UDP multicast endpoint with a background receive thread. Loopback is
// enabled so co-located endpoints hear each other.
class UdpMulticastTransport final : public Transport {
public:
    static Result<std::shared_ptr<UdpMulticastTransport>, TransportError> open(
        const UdpMulticastConfig& cfg);
    ~UdpMulticastTransport() override;

    bool send(std::span<const std::uint8_t> bytes) override;
    void set_receive_callback(ReceiveFn fn) override;

private:
    UdpMulticastTransport() = default;
    void rx_loop();

    int tx_fd_ = -1;
    int rx_fd_ = -1;
    UdpMulticastConfig cfg_;
    std::thread rx_thread_;
    std::atomic<bool> stop_{false};
    std::mutex cb_mu_;
    ReceiveFn cb_;
};

}  // namespace flexgate::goose
