#include "flexgate/acsi/client.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include "flexgate/common/bytes.hpp"
#include "flexgate/goose/frame.hpp"
#include "net.hpp"

namespace flexgate::acsi {

using model::DataValue;
using model::ObjectReference;
using model::TimestampUs;

const char* to_string(ClientError e) {
    switch (e) {
        case ClientError::NotFound: return "NotFound";
        case ClientError::TypeMismatch: return "TypeMismatch";
        case ClientError::AccessDenied: return "AccessDenied";
        case ClientError::ProtocolError: return "ProtocolError";
        case ClientError::Transport: return "Transport";
    }
    return "?";
}

namespace {

std::optional<ClientError> status_error(std::uint8_t status) {
    switch (static_cast<StatusCode>(status)) {
        case StatusCode::Ok: return std::nullopt;
        case StatusCode::NotFound: return ClientError::NotFound;
        case StatusCode::TypeMismatch: return ClientError::TypeMismatch;
        case StatusCode::AccessDenied: return ClientError::AccessDenied;
        case StatusCode::ProtocolError: return ClientError::ProtocolError;
    }
    return ClientError::ProtocolError;
}

}  // namespace

Result<std::unique_ptr<AcsiClient>, ClientError> AcsiClient::connect(const std::string& host,
                                                                     std::uint16_t port) {
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) return ClientError::Transport;
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1 ||
        ::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
        ::close(fd);
        return ClientError::Transport;
    }
    int nodelay = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &nodelay, sizeof(nodelay));

    std::unique_ptr<AcsiClient> c(new AcsiClient());
    c->fd_ = fd;
    c->reader_ = std::thread([p = c.get()] { p->reader_loop(); });
    return c;
}

AcsiClient::~AcsiClient() { close(); }

void AcsiClient::close() {
    {
        std::lock_guard lk(state_mu_);
        if (down_ && !reader_.joinable()) return;
        down_ = true;
    }
    if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
    if (reader_.joinable()) reader_.join();
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
    resp_cv_.notify_all();
}

void AcsiClient::reader_loop() {
    for (;;) {
        auto r = read_envelope(fd_);
        if (r.status != ReadStatus::Ok) break;
        if (r.envelope.opcode == kOpReportPush) {
            ByteReader br(r.envelope.payload);
            auto dataset = br.text16();
            auto count = br.u16();
            if (!dataset || !count) continue;
            std::vector<DataValue> values;
            values.reserve(*count);
            bool ok = true;
            for (std::uint16_t i = 0; i < *count && ok; ++i) {
                auto v = goose::decode_value(br);
                if (!v) {
                    ok = false;
                    break;
                }
                values.push_back(std::move(v).take());
            }
            if (!ok) continue;
            ReportCallback cb;
            {
                std::lock_guard lk(state_mu_);
                auto it = report_cbs_.find(*dataset);
                if (it != report_cbs_.end()) cb = it->second;
            }
            if (cb) cb(*dataset, values);
            continue;
        }
        std::lock_guard lk(state_mu_);
        pending_resp_ = std::move(r.envelope);
        resp_cv_.notify_all();
    }
    std::lock_guard lk(state_mu_);
    down_ = true;
    resp_cv_.notify_all();
}

Result<Envelope, ClientError> AcsiClient::request(const Envelope& req) {
    std::lock_guard reqlk(req_mu_);
    {
        std::lock_guard lk(state_mu_);
        if (down_) return ClientError::Transport;
        pending_resp_.reset();
    }
    if (!write_envelope(fd_, req)) return ClientError::Transport;
    std::unique_lock lk(state_mu_);
    resp_cv_.wait(lk, [&] { return pending_resp_.has_value() || down_; });
    if (!pending_resp_) return ClientError::Transport;
    Envelope resp = std::move(*pending_resp_);
    pending_resp_.reset();
    if (resp.opcode != (req.opcode | kOpResponseFlag)) return ClientError::ProtocolError;
    if (resp.payload.empty()) return ClientError::ProtocolError;
    return resp;
}

Result<std::vector<ObjectReference>, ClientError> AcsiClient::browse(const std::string& prefix) {
    ByteWriter w;
    w.text16(prefix);
    auto resp = request(Envelope{kOpGetDirectory, w.take()});
    if (!resp) return resp.error();
    ByteReader r(resp.value().payload);
    auto status = r.u8();
    if (auto err = status_error(*status)) return *err;
    auto count = r.u16();
    if (!count) return ClientError::ProtocolError;
    std::vector<ObjectReference> refs;
    refs.reserve(*count);
    for (std::uint16_t i = 0; i < *count; ++i) {
        auto path = r.text16();
        if (!path) return ClientError::ProtocolError;
        auto ref = ObjectReference::parse(*path);
        if (!ref) return ClientError::ProtocolError;
        refs.push_back(std::move(*ref));
    }
    return refs;
}

Result<std::pair<DataValue, TimestampUs>, ClientError> AcsiClient::read(
    const ObjectReference& ref) {
    ByteWriter w;
    w.text16(ref.str());
    auto resp = request(Envelope{kOpRead, w.take()});
    if (!resp) return resp.error();
    ByteReader r(resp.value().payload);
    auto status = r.u8();
    if (auto err = status_error(*status)) return *err;
    auto value = goose::decode_value(r);
    auto ts = r.u64();
    if (!value || !ts || r.remaining() != 0) return ClientError::ProtocolError;
    return std::pair<DataValue, TimestampUs>{std::move(value).take(), TimestampUs{*ts}};
}

Result<void, ClientError> AcsiClient::write(const ObjectReference& ref, const DataValue& value) {
    ByteWriter w;
    w.text16(ref.str());
    if (auto enc = goose::encode_value(w, value); !enc) return ClientError::ProtocolError;
    auto resp = request(Envelope{kOpWrite, w.take()});
    if (!resp) return resp.error();
    if (auto err = status_error(resp.value().payload[0])) return *err;
    return {};
}

Result<void, ClientError> AcsiClient::subscribe_report(const ReportControl& rcb,
                                                       ReportCallback cb) {
    {
        std::lock_guard lk(state_mu_);
        report_cbs_[rcb.dataset] = std::move(cb);
    }
    ByteWriter w;
    w.text16(rcb.dataset);
    w.u8(rcb.periodic ? kModePeriodic : kModeOnChange);
    w.u32(rcb.period_ms);
    auto resp = request(Envelope{kOpSubscribeReport, w.take()});
    if (!resp) return resp.error();
    if (auto err = status_error(resp.value().payload[0])) {
        std::lock_guard lk(state_mu_);
        report_cbs_.erase(rcb.dataset);
        return *err;
    }
    return {};
}

}  // namespace flexgate::acsi
