#pragma once

#include <cstdint>
#include <string>
#include <variant>

namespace flexgate::model {

// Microsecond Unix timestamp, kept distinct from plain integers.
struct TimestampUs {
    std::uint64_t us = 0;
    friend bool operator==(const TimestampUs&, const TimestampUs&) = default;
};

// Typed payloads a data attribute can hold.
using DataValue = std::variant<bool, std::int32_t, float, double, std::string, TimestampUs>;

// Discriminants double as the wire TLV tags.
enum class ValueKind : std::uint8_t {
    Bool = 1,
    Int32 = 2,
    Float32 = 3,
    Float64 = 4,
    Text = 5,
    TimestampUs = 6,
};

inline ValueKind kind_of(const DataValue& v) {
    return static_cast<ValueKind>(v.index() + 1);
}

const char* to_string(ValueKind k);

}  // namespace flexgate::model
