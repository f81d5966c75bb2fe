#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "flexgate/common/bytes.hpp"
#include "flexgate/common/result.hpp"
#include "flexgate/model/value.hpp"

namespace flexgate::goose {

using model::DataValue;

// One publish/subscribe event frame. stNum counts value changes, sqNum counts
// retransmissions of the same values.
struct GooseFrame {
    std::uint16_t app_id = 0;
    std::string go_id;
    std::uint32_t st_num = 0;
    std::uint32_t sq_num = 0;
    std::uint64_t timestamp_us = 0;
    std::uint32_t ttl_ms = 0;
    std::vector<DataValue> entries;

    friend bool operator==(const GooseFrame&, const GooseFrame&) = default;
};

enum class CodecError : std::uint8_t {
    GoIdTooLong,
    TextTooLong,
    TooManyEntries,
    BadTag,
    Truncated,
    BadMagic,
    BadVersion,
    TrailingBytes,
};

const char* to_string(CodecError e);

inline constexpr std::array<std::uint8_t, 4> kMagic{0x47, 0x53, 0x45, 0x31};  // "GSE1"
inline constexpr std::uint8_t kWireVersion = 0x01;

// Shared TLV value coding (tag u8, then fixed or length-prefixed payload).
// Also used by the acsi wire protocol and anything else moving DataValues.
Result<void, CodecError> encode_value(ByteWriter& w, const DataValue& v);
Result<DataValue, CodecError> decode_value(ByteReader& r);

Result<std::vector<std::uint8_t>, CodecError> encode_frame(const GooseFrame& f);
Result<GooseFrame, CodecError> decode_frame(std::span<const std::uint8_t> bytes);

}  // namespace flexgate::goose
