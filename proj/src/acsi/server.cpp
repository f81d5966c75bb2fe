#include "flexgate/acsi/server.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <condition_variable>
#include <cstring>
#include <set>

#include "flexgate/common/bytes.hpp"
#include "flexgate/goose/frame.hpp"
#include "net.hpp"

namespace flexgate::acsi {

using model::DataValue;
using model::ModelError;
using model::ObjectReference;

namespace {

StatusCode status_from(ModelError e) {
    switch (e) {
        case ModelError::NotFound: return StatusCode::NotFound;
        case ModelError::TypeMismatch: return StatusCode::TypeMismatch;
        case ModelError::AccessDenied: return StatusCode::AccessDenied;
        default: return StatusCode::ProtocolError;
    }
}

Envelope status_only(std::uint8_t opcode, StatusCode s) {
    return Envelope{static_cast<std::uint8_t>(opcode | kOpResponseFlag),
                    {static_cast<std::uint8_t>(s)}};
}

}  // namespace

struct AcsiServer::Connection {
    int fd = -1;
    std::thread thread;
    std::mutex write_mu;
    std::atomic<bool> closed{false};
    std::vector<int> observer_ids;
    std::vector<std::thread> periodic_threads;
    std::mutex cv_mu;
    std::condition_variable cv;
    std::atomic<bool> torn_down{false};

    ~Connection() {
        if (fd >= 0) ::close(fd);
    }
};

AcsiServer::AcsiServer(std::shared_ptr<model::ServerModel> model, AcsiServerConfig cfg,
                       std::shared_ptr<Clock> clock)
    : model_(std::move(model)), cfg_(std::move(cfg)), clock_(std::move(clock)) {}

AcsiServer::~AcsiServer() { stop(); }

Result<void, ServerError> AcsiServer::start() {
    if (running_.exchange(true)) return ServerError::AlreadyRunning;

    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) {
        running_.store(false);
        return ServerError::BindFailure;
    }
    int reuse = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &reuse, sizeof(reuse));

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(cfg_.port);
    if (inet_pton(AF_INET, cfg_.bind_addr.c_str(), &addr.sin_addr) != 1 ||
        ::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 ||
        ::listen(listen_fd_, 16) != 0) {
        ::close(listen_fd_);
        listen_fd_ = -1;
        running_.store(false);
        return ServerError::BindFailure;
    }

    sockaddr_in bound{};
    socklen_t blen = sizeof(bound);
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&bound), &blen);
    bound_port_ = ntohs(bound.sin_port);

    stopping_.store(false);
    accept_thread_ = std::thread([this] { accept_loop(); });
    return {};
}

void AcsiServer::stop() {
    if (!running_.load()) return;
    stopping_.store(true);
    if (listen_fd_ >= 0) {
        ::shutdown(listen_fd_, SHUT_RDWR);
        ::close(listen_fd_);
        listen_fd_ = -1;
    }
    if (accept_thread_.joinable()) accept_thread_.join();

    std::vector<std::shared_ptr<Connection>> conns;
    {
        std::lock_guard lk(conns_mu_);
        conns.swap(conns_);
    }
    for (auto& c : conns) {
        c->closed.store(true);
        ::shutdown(c->fd, SHUT_RDWR);
        c->cv.notify_all();
        if (c->thread.joinable()) c->thread.join();
    }
    running_.store(false);
}

void AcsiServer::accept_loop() {
    while (!stopping_.load()) {
        int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd < 0) {
            if (stopping_.load()) break;
            continue;
        }
        int nodelay = 1;
        ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &nodelay, sizeof(nodelay));
        auto conn = std::make_shared<Connection>();
        conn->fd = fd;
        {
            std::lock_guard lk(conns_mu_);
            conns_.push_back(conn);
        }
        conn->thread = std::thread([this, conn] { connection_loop(conn); });
    }
}

void AcsiServer::connection_loop(const std::shared_ptr<Connection>& conn) {
    while (!conn->closed.load()) {
        auto r = read_envelope(conn->fd);
        if (r.status == ReadStatus::Eof) break;
        if (r.status == ReadStatus::Malformed) {
            Envelope err{kOpProtocolError,
                         {static_cast<std::uint8_t>(StatusCode::ProtocolError)}};
            std::lock_guard wl(conn->write_mu);
            write_envelope(conn->fd, err);
            break;
        }
        Envelope resp = handle(conn, r.envelope);
        std::lock_guard wl(conn->write_mu);
        if (!write_envelope(conn->fd, resp)) break;
    }
    teardown(conn);
}

void AcsiServer::teardown(const std::shared_ptr<Connection>& conn) {
    if (conn->torn_down.exchange(true)) return;
    conn->closed.store(true);
    for (int id : conn->observer_ids) model_->remove_write_observer(id);
    conn->cv.notify_all();
    for (auto& t : conn->periodic_threads) {
        if (t.joinable()) t.join();
    }
    ::shutdown(conn->fd, SHUT_RDWR);
}

Envelope AcsiServer::handle(const std::shared_ptr<Connection>& conn, const Envelope& req) {
    switch (req.opcode) {
        case kOpGetDirectory: return handle_directory(req);
        case kOpRead: return handle_read(req);
        case kOpWrite: return handle_write(req);
        case kOpSubscribeReport: return handle_subscribe(conn, req);
        default: return status_only(req.opcode, StatusCode::ProtocolError);
    }
}

Envelope AcsiServer::handle_directory(const Envelope& req) {
    ByteReader r(req.payload);
    auto prefix = r.text16();
    if (!prefix || r.remaining() != 0) {
        return status_only(kOpGetDirectory, StatusCode::ProtocolError);
    }
    auto refs = model_->browse(*prefix);
    ByteWriter w;
    w.u8(static_cast<std::uint8_t>(StatusCode::Ok));
    w.u16(static_cast<std::uint16_t>(refs.size()));
    for (const auto& ref : refs) w.text16(ref.str());
    return Envelope{kOpGetDirectory | kOpResponseFlag, w.take()};
}

Envelope AcsiServer::handle_read(const Envelope& req) {
    ByteReader r(req.payload);
    auto path = r.text16();
    if (!path || r.remaining() != 0) return status_only(kOpRead, StatusCode::ProtocolError);
    auto ref = ObjectReference::parse(*path);
    if (!ref) return status_only(kOpRead, StatusCode::NotFound);
    auto rd = model_->read(*ref);
    if (!rd) return status_only(kOpRead, status_from(rd.error()));
    ByteWriter w;
    w.u8(static_cast<std::uint8_t>(StatusCode::Ok));
    if (auto enc = goose::encode_value(w, rd.value().first); !enc) {
        return status_only(kOpRead, StatusCode::ProtocolError);
    }
    w.u64(rd.value().second.us);
    return Envelope{kOpRead | kOpResponseFlag, w.take()};
}

Envelope AcsiServer::handle_write(const Envelope& req) {
    ByteReader r(req.payload);
    auto path = r.text16();
    if (!path) return status_only(kOpWrite, StatusCode::ProtocolError);
    auto value = goose::decode_value(r);
    if (!value || r.remaining() != 0) return status_only(kOpWrite, StatusCode::ProtocolError);
    auto ref = ObjectReference::parse(*path);
    if (!ref) return status_only(kOpWrite, StatusCode::NotFound);
    auto wr = model_->write(*ref, std::move(value).take(), model::WriteChannel::Controller);
    if (!wr) return status_only(kOpWrite, status_from(wr.error()));
    return status_only(kOpWrite, StatusCode::Ok);
}

void AcsiServer::push_report(const std::shared_ptr<Connection>& conn,
                             const std::string& dataset) {
    auto snap = model_->snapshot_dataset(dataset);
    if (!snap) return;
    ByteWriter w;
    w.text16(dataset);
    w.u16(static_cast<std::uint16_t>(snap.value().size()));
    for (const auto& v : snap.value()) {
        if (auto enc = goose::encode_value(w, v); !enc) return;
    }
    Envelope push{kOpReportPush, w.take()};
    std::lock_guard wl(conn->write_mu);
    if (conn->closed.load()) return;
    write_envelope(conn->fd, push);
}

Envelope AcsiServer::handle_subscribe(const std::shared_ptr<Connection>& conn,
                                      const Envelope& req) {
    ByteReader r(req.payload);
    auto dataset = r.text16();
    auto mode = r.u8();
    auto period = r.u32();
    if (!dataset || !mode || !period || r.remaining() != 0 ||
        (*mode != kModeOnChange && *mode != kModePeriodic)) {
        return status_only(kOpSubscribeReport, StatusCode::ProtocolError);
    }
    if (*mode == kModePeriodic && *period < 10) {
        return status_only(kOpSubscribeReport, StatusCode::ProtocolError);
    }
    auto ds = model_->dataset(*dataset);
    if (!ds) return status_only(kOpSubscribeReport, status_from(ds.error()));

    std::string name = *dataset;
    if (*mode == kModeOnChange) {
        std::set<ObjectReference> members(ds.value().members.begin(), ds.value().members.end());
        std::weak_ptr<Connection> weak = conn;
        int id = model_->add_write_observer(
            [this, weak, name, members = std::move(members)](
                const ObjectReference& ref, const DataValue&, model::TimestampUs) {
                if (!members.contains(ref)) return;
                auto c = weak.lock();
                if (!c || c->closed.load()) return;
                push_report(c, name);
            });
        conn->observer_ids.push_back(id);
    } else {
        std::uint32_t period_ms = *period;
        std::weak_ptr<Connection> weak = conn;
        conn->periodic_threads.emplace_back([this, weak, name, period_ms] {
            auto conn = weak.lock();
            if (!conn) return;
            std::unique_lock lk(conn->cv_mu);
            while (!conn->closed.load()) {
                if (conn->cv.wait_for(lk, std::chrono::milliseconds(period_ms),
                                      [&] { return conn->closed.load(); })) {
                    break;
                }
                lk.unlock();
                push_report(conn, name);
                lk.lock();
            }
        });
    }
    return status_only(kOpSubscribeReport, StatusCode::Ok);
}

}  // namespace flexgate::acsi
