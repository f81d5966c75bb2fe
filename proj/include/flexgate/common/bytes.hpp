#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace flexgate {

// Append-only big-endian encoder.
class ByteWriter {
public:
    void u8(std::uint8_t v) { buf_.push_back(v); }

    void u16(std::uint16_t v) {
        buf_.push_back(static_cast<std::uint8_t>(v >> 8));
        buf_.push_back(static_cast<std::uint8_t>(v));
    }

    void u32(std::uint32_t v) {
        for (int s = 24; s >= 0; s -= 8) buf_.push_back(static_cast<std::uint8_t>(v >> s));
    }

    void u64(std::uint64_t v) {
        for (int s = 56; s >= 0; s -= 8) buf_.push_back(static_cast<std::uint8_t>(v >> s));
    }

    void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

    void bytes(std::span<const std::uint8_t> b) { buf_.insert(buf_.end(), b.begin(), b.end()); }

    void raw_text(std::string_view s) {
        const auto* p = reinterpret_cast<const std::uint8_t*>(s.data());
        buf_.insert(buf_.end(), p, p + s.size());
    }

    // u16 length prefix followed by the bytes; caller checks size() <= 65535.
    void text16(std::string_view s) {
        u16(static_cast<std::uint16_t>(s.size()));
        raw_text(s);
    }

    std::size_t size() const { return buf_.size(); }
    const std::vector<std::uint8_t>& data() const { return buf_; }
    std::vector<std::uint8_t> take() { return std::move(buf_); }

private:
    std::vector<std::uint8_t> buf_;
};

// Bounds-checked big-endian decoder; every read reports nullopt past the end.
class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> b) : b_(b) {}

    std::optional<std::uint8_t> u8() {
        if (remaining() < 1) return std::nullopt;
        return b_[pos_++];
    }

    std::optional<std::uint16_t> u16() {
        if (remaining() < 2) return std::nullopt;
        std::uint16_t v = static_cast<std::uint16_t>(std::uint16_t{b_[pos_]} << 8 | b_[pos_ + 1]);
        pos_ += 2;
        return v;
    }

    std::optional<std::uint32_t> u32() {
        if (remaining() < 4) return std::nullopt;
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v = v << 8 | b_[pos_ + i];
        pos_ += 4;
        return v;
    }

    std::optional<std::uint64_t> u64() {
        if (remaining() < 8) return std::nullopt;
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v = v << 8 | b_[pos_ + i];
        pos_ += 8;
        return v;
    }

    std::optional<float> f32() {
        auto v = u32();
        if (!v) return std::nullopt;
        return std::bit_cast<float>(*v);
    }

    std::optional<double> f64() {
        auto v = u64();
        if (!v) return std::nullopt;
        return std::bit_cast<double>(*v);
    }

    std::optional<std::string> text(std::size_t n) {
        if (remaining() < n) return std::nullopt;
        std::string s(reinterpret_cast<const char*>(b_.data() + pos_), n);
        pos_ += n;
        return s;
    }

    std::optional<std::string> text16() {
        auto n = u16();
        if (!n) return std::nullopt;
        return text(*n);
    }

    std::optional<std::span<const std::uint8_t>> bytes(std::size_t n) {
        if (remaining() < n) return std::nullopt;
        auto s = b_.subspan(pos_, n);
        pos_ += n;
        return s;
    }

    std::size_t remaining() const { return b_.size() - pos_; }
    std::size_t position() const { return pos_; }

private:
    std::span<const std::uint8_t> b_;
    std::size_t pos_ = 0;
};

}  // namespace flexgate
