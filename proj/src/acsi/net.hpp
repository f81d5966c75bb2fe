#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "flexgate/acsi/protocol.hpp"

namespace flexgate::acsi {

// Blocking socket helpers shared by server and client.
bool send_all(int fd, std::span<const std::uint8_t> bytes);
bool recv_exact(int fd, std::uint8_t* dst, std::size_t n);

enum class ReadStatus : std::uint8_t { Ok, Eof, Malformed };

struct ReadResult {
    ReadStatus status = ReadStatus::Eof;
    Envelope envelope;
};

// Reads one length-prefixed envelope. Malformed means the framing itself is
// broken (zero or oversized length): the stream cannot be resynchronized.
ReadResult read_envelope(int fd);
bool write_envelope(int fd, const Envelope& e);

}  // namespace flexgate::acsi
