#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace flexgate::acsi {

// Request opcodes; a response echoes the request opcode with the high bit
// set. 0x90 marks an unsolicited report push.
inline constexpr std::uint8_t kOpGetDirectory = 0x01;
inline constexpr std::uint8_t kOpRead = 0x02;
inline constexpr std::uint8_t kOpWrite = 0x03;
inline constexpr std::uint8_t kOpSubscribeReport = 0x04;
inline constexpr std::uint8_t kOpResponseFlag = 0x80;
inline constexpr std::uint8_t kOpReportPush = 0x90;
inline constexpr std::uint8_t kOpProtocolError = 0xFF;

// First byte of every response payload.
enum class StatusCode : std::uint8_t {
    Ok = 0,
    NotFound = 1,
    TypeMismatch = 2,
    AccessDenied = 3,
    ProtocolError = 4,
};

const char* to_string(StatusCode s);

inline constexpr std::uint8_t kModeOnChange = 0;
inline constexpr std::uint8_t kModePeriodic = 1;

struct ReportControl {
    std::string dataset;
    bool periodic = false;
    std::uint32_t period_ms = 0;  // >= 10 when periodic

    static ReportControl on_change(std::string dataset) {
        return ReportControl{std::move(dataset), false, 0};
    }
    static ReportControl every_ms(std::string dataset, std::uint32_t period_ms) {
        return ReportControl{std::move(dataset), true, period_ms};
    }
};

struct Envelope {
    std::uint8_t opcode = 0;
    std::vector<std::uint8_t> payload;
};

// Envelope framing: u32 byte count of what follows (opcode + payload), then
// the opcode byte, then the payload.
std::vector<std::uint8_t> frame_envelope(const Envelope& e);

inline constexpr std::uint32_t kMaxEnvelopeBytes = 1 << 24;
inline constexpr std::uint16_t kDefaultPort = 10203;

}  // namespace flexgate::acsi
