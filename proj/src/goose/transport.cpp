#include "flexgate/goose/transport.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <array>
#include <cstring>

namespace flexgate::goose {

const char* to_string(TransportError e) {
    switch (e) {
        case TransportError::SocketFailure: return "SocketFailure";
        case TransportError::BindFailure: return "BindFailure";
        case TransportError::JoinFailure: return "JoinFailure";
    }
    return "?";
}

class InProcBus::Endpoint final : public Transport,
                                  public std::enable_shared_from_this<Endpoint> {
public:
    explicit Endpoint(std::shared_ptr<Hub> hub) : hub_(std::move(hub)) {}

    bool send(std::span<const std::uint8_t> bytes) override {
        std::vector<std::shared_ptr<Endpoint>> peers;
        {
            std::lock_guard lk(hub_->mu);
            for (auto it = hub_->endpoints.begin(); it != hub_->endpoints.end();) {
                if (auto p = it->lock()) {
                    if (p.get() != this) peers.push_back(std::move(p));
                    ++it;
                } else {
                    it = hub_->endpoints.erase(it);
                }
            }
        }
        for (auto& p : peers) p->deliver(bytes);
        return true;
    }

    void set_receive_callback(ReceiveFn fn) override {
        std::lock_guard lk(cb_mu_);
        cb_ = std::move(fn);
    }

private:
    void deliver(std::span<const std::uint8_t> bytes) {
        ReceiveFn fn;
        {
            std::lock_guard lk(cb_mu_);
            fn = cb_;
        }
        if (fn) fn(bytes);
    }

    std::shared_ptr<Hub> hub_;
    std::mutex cb_mu_;
    ReceiveFn cb_;
};

std::shared_ptr<Transport> InProcBus::endpoint() {
    auto ep = std::make_shared<Endpoint>(hub_);
    std::lock_guard lk(hub_->mu);
    hub_->endpoints.push_back(ep);
    return ep;
}

Result<std::shared_ptr<UdpMulticastTransport>, TransportError> UdpMulticastTransport::open(
    const UdpMulticastConfig& cfg) {
    std::shared_ptr<UdpMulticastTransport> t(new UdpMulticastTransport());
    t->cfg_ = cfg;

    in_addr group{};
    in_addr iface{};
    if (inet_pton(AF_INET, cfg.group.c_str(), &group) != 1 ||
        inet_pton(AF_INET, cfg.interface_addr.c_str(), &iface) != 1) {
        return TransportError::SocketFailure;
    }

    t->tx_fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
    t->rx_fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
    if (t->tx_fd_ < 0 || t->rx_fd_ < 0) return TransportError::SocketFailure;

    unsigned char loop = 1;
    ::setsockopt(t->tx_fd_, IPPROTO_IP, IP_MULTICAST_LOOP, &loop, sizeof(loop));
    if (::setsockopt(t->tx_fd_, IPPROTO_IP, IP_MULTICAST_IF, &iface, sizeof(iface)) != 0) {
        return TransportError::SocketFailure;
    }

    int reuse = 1;
    ::setsockopt(t->rx_fd_, SOL_SOCKET, SO_REUSEADDR, &reuse, sizeof(reuse));
    sockaddr_in bind_addr{};
    bind_addr.sin_family = AF_INET;
    bind_addr.sin_addr.s_addr = htonl(INADDR_ANY);
    bind_addr.sin_port = htons(cfg.port);
    if (::bind(t->rx_fd_, reinterpret_cast<sockaddr*>(&bind_addr), sizeof(bind_addr)) != 0) {
        return TransportError::BindFailure;
    }

    ip_mreq mreq{};
    mreq.imr_multiaddr = group;
    mreq.imr_interface = iface;
    if (::setsockopt(t->rx_fd_, IPPROTO_IP, IP_ADD_MEMBERSHIP, &mreq, sizeof(mreq)) != 0) {
        return TransportError::JoinFailure;
    }

    t->rx_thread_ = std::thread([t] { t->rx_loop(); });
    return t;
}

UdpMulticastTransport::~UdpMulticastTransport() {
    stop_.store(true);
    if (rx_thread_.joinable()) rx_thread_.join();
    if (tx_fd_ >= 0) ::close(tx_fd_);
    if (rx_fd_ >= 0) ::close(rx_fd_);
}

bool UdpMulticastTransport::send(std::span<const std::uint8_t> bytes) {
    sockaddr_in dst{};
    dst.sin_family = AF_INET;
    dst.sin_port = htons(cfg_.port);
    if (inet_pton(AF_INET, cfg_.group.c_str(), &dst.sin_addr) != 1) return false;
    auto n = ::sendto(tx_fd_, bytes.data(), bytes.size(), 0, reinterpret_cast<sockaddr*>(&dst),
                      sizeof(dst));
    return n == static_cast<ssize_t>(bytes.size());
}

void UdpMulticastTransport::set_receive_callback(ReceiveFn fn) {
    std::lock_guard lk(cb_mu_);
    cb_ = std::move(fn);
}

void UdpMulticastTransport::rx_loop() {
    std::array<std::uint8_t, 65536> buf;
    while (!stop_.load()) {
        pollfd pfd{rx_fd_, POLLIN, 0};
        int pr = ::poll(&pfd, 1, 50);
        if (pr <= 0) continue;
        auto n = ::recv(rx_fd_, buf.data(), buf.size(), 0);
        if (n <= 0) continue;
        ReceiveFn fn;
        {
            std::lock_guard lk(cb_mu_);
            fn = cb_;
        }
        if (fn) fn(std::span<const std::uint8_t>(buf.data(), static_cast<std::size_t>(n)));
    }
}

}  // namespace flexgate::goose
