#include "flexgate/goose/frame.hpp"

#include <limits>

namespace flexgate::goose {

using model::TimestampUs;
using model::ValueKind;

const char* to_string(CodecError e) {
    switch (e) {
        case CodecError::GoIdTooLong: return "GoIdTooLong";
        case CodecError::TextTooLong: return "TextTooLong";
        case CodecError::TooManyEntries: return "TooManyEntries";
        case CodecError::BadTag: return "BadTag";
        case CodecError::Truncated: return "Truncated";
        case CodecError::BadMagic: return "BadMagic";
        case CodecError::BadVersion: return "BadVersion";
        case CodecError::TrailingBytes: return "TrailingBytes";
    }
    return "?";
}

Result<void, CodecError> encode_value(ByteWriter& w, const DataValue& v) {
    w.u8(static_cast<std::uint8_t>(model::kind_of(v)));
    switch (model::kind_of(v)) {
        case ValueKind::Bool:
            w.u8(std::get<bool>(v) ? 1 : 0);
            return {};
        case ValueKind::Int32:
            w.u32(static_cast<std::uint32_t>(std::get<std::int32_t>(v)));
            return {};
        case ValueKind::Float32:
            w.f32(std::get<float>(v));
            return {};
        case ValueKind::Float64:
            w.f64(std::get<double>(v));
            return {};
        case ValueKind::Text: {
            const auto& s = std::get<std::string>(v);
            if (s.size() > std::numeric_limits<std::uint16_t>::max()) {
                return CodecError::TextTooLong;
            }
            w.text16(s);
            return {};
        }
        case ValueKind::TimestampUs:
            w.u64(std::get<TimestampUs>(v).us);
            return {};
    }
    return CodecError::BadTag;
}

Result<DataValue, CodecError> decode_value(ByteReader& r) {
    auto tag = r.u8();
    if (!tag) return CodecError::Truncated;
    switch (static_cast<ValueKind>(*tag)) {
        case ValueKind::Bool: {
            auto b = r.u8();
            if (!b) return CodecError::Truncated;
            return DataValue{*b != 0};
        }
        case ValueKind::Int32: {
            auto v = r.u32();
            if (!v) return CodecError::Truncated;
            return DataValue{static_cast<std::int32_t>(*v)};
        }
        case ValueKind::Float32: {
            auto v = r.f32();
            if (!v) return CodecError::Truncated;
            return DataValue{*v};
        }
        case ValueKind::Float64: {
            auto v = r.f64();
            if (!v) return CodecError::Truncated;
            return DataValue{*v};
        }
        case ValueKind::Text: {
            auto s = r.text16();
            if (!s) return CodecError::Truncated;
            return DataValue{std::move(*s)};
        }
        case ValueKind::TimestampUs: {
            auto v = r.u64();
            if (!v) return CodecError::Truncated;
            return DataValue{TimestampUs{*v}};
        }
        default:
            return CodecError::BadTag;
    }
}

Result<std::vector<std::uint8_t>, CodecError> encode_frame(const GooseFrame& f) {
    if (f.go_id.size() > 255) return CodecError::GoIdTooLong;
    if (f.entries.size() > std::numeric_limits<std::uint16_t>::max()) {
        return CodecError::TooManyEntries;
    }
    ByteWriter w;
    w.bytes(kMagic);
    w.u8(kWireVersion);
    w.u16(f.app_id);
    w.u8(static_cast<std::uint8_t>(f.go_id.size()));
    w.raw_text(f.go_id);
    w.u32(f.st_num);
    w.u32(f.sq_num);
    w.u64(f.timestamp_us);
    w.u32(f.ttl_ms);
    w.u16(static_cast<std::uint16_t>(f.entries.size()));
    for (const auto& e : f.entries) {
        if (auto r = encode_value(w, e); !r) return r.error();
    }
    return w.take();
}

Result<GooseFrame, CodecError> decode_frame(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    auto magic = r.bytes(4);
    if (!magic) return CodecError::Truncated;
    if (!std::equal(magic->begin(), magic->end(), kMagic.begin())) return CodecError::BadMagic;
    auto version = r.u8();
    if (!version) return CodecError::Truncated;
    if (*version != kWireVersion) return CodecError::BadVersion;

    GooseFrame f;
    auto app_id = r.u16();
    auto go_id_len = r.u8();
    if (!app_id || !go_id_len) return CodecError::Truncated;
    f.app_id = *app_id;
    auto go_id = r.text(*go_id_len);
    if (!go_id) return CodecError::Truncated;
    f.go_id = std::move(*go_id);

    auto st = r.u32();
    auto sq = r.u32();
    auto ts = r.u64();
    auto ttl = r.u32();
    auto n = r.u16();
    if (!st || !sq || !ts || !ttl || !n) return CodecError::Truncated;
    f.st_num = *st;
    f.sq_num = *sq;
    f.timestamp_us = *ts;
    f.ttl_ms = *ttl;

    f.entries.reserve(*n);
    for (std::uint16_t i = 0; i < *n; ++i) {
        auto v = decode_value(r);
        if (!v) return v.error();
        f.entries.push_back(std::move(v).take());
    }
    if (r.remaining() != 0) return CodecError::TrailingBytes;
    return f;
}

}  // namespace flexgate::goose
