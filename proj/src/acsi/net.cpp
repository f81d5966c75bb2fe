#include "net.hpp"

#include <sys/socket.h>

#include "flexgate/common/bytes.hpp"

namespace flexgate::acsi {

const char* to_string(StatusCode s) {
    switch (s) {
        case StatusCode::Ok: return "Ok";
        case StatusCode::NotFound: return "NotFound";
        case StatusCode::TypeMismatch: return "TypeMismatch";
        case StatusCode::AccessDenied: return "AccessDenied";
        case StatusCode::ProtocolError: return "ProtocolError";
    }
    return "?";
}

std::vector<std::uint8_t> frame_envelope(const Envelope& e) {
    ByteWriter w;
    w.u32(static_cast<std::uint32_t>(e.payload.size() + 1));
    w.u8(e.opcode);
    w.bytes(e.payload);
    return w.take();
}

bool send_all(int fd, std::span<const std::uint8_t> bytes) {
    std::size_t sent = 0;
    while (sent < bytes.size()) {
        auto n = ::send(fd, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
        if (n <= 0) return false;
        sent += static_cast<std::size_t>(n);
    }
    return true;
}

bool recv_exact(int fd, std::uint8_t* dst, std::size_t n) {
    std::size_t got = 0;
    while (got < n) {
        auto r = ::recv(fd, dst + got, n - got, 0);
        if (r <= 0) return false;
        got += static_cast<std::size_t>(r);
    }
    return true;
}

ReadResult read_envelope(int fd) {
    std::uint8_t head[4];
    if (!recv_exact(fd, head, 4)) return {ReadStatus::Eof, {}};
    std::uint32_t len = 0;
    for (auto b : head) len = len << 8 | b;
    if (len < 1 || len > kMaxEnvelopeBytes) return {ReadStatus::Malformed, {}};
    ReadResult r{ReadStatus::Ok, {}};
    r.envelope.payload.resize(len - 1);
    if (!recv_exact(fd, &r.envelope.opcode, 1)) return {ReadStatus::Eof, {}};
    if (!r.envelope.payload.empty() &&
        !recv_exact(fd, r.envelope.payload.data(), r.envelope.payload.size())) {
        return {ReadStatus::Eof, {}};
    }
    return r;
}

bool write_envelope(int fd, const Envelope& e) { return send_all(fd, frame_envelope(e)); }

}  // namespace flexgate::acsi
