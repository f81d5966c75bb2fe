#include "flexgate/agg/ledger.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <fstream>

namespace flexgate::agg {

const char* to_string(ChainError e) {
    switch (e) {
        case ChainError::BadTx: return "BadTx";
        case ChainError::DuplicateProsumer: return "DuplicateProsumer";
        case ChainError::EmptyDispatch: return "EmptyDispatch";
        case ChainError::Io: return "Io";
        case ChainError::Corrupt: return "Corrupt";
    }
    return "?";
}

Hash sha256(std::span<const std::uint8_t> bytes) {
    Hash out{};
    unsigned int len = 0;
    EVP_Digest(bytes.data(), bytes.size(), out.data(), &len, EVP_sha256(), nullptr);
    return out;
}

std::string to_hex(const Hash& h) {
    static const char* digits = "0123456789abcdef";
    std::string s;
    s.reserve(64);
    for (auto b : h) {
        s.push_back(digits[b >> 4]);
        s.push_back(digits[b & 0xf]);
    }
    return s;
}

namespace {

constexpr std::uint8_t kTagCapacity = 1;
constexpr std::uint8_t kTagDispatch = 2;
constexpr std::uint8_t kTagMeasurement = 3;

}  // namespace

bool tx_valid(const Tx& tx) {
    if (const auto* c = std::get_if<CapacityReport>(&tx)) {
        return c->p_min_w <= 0.0 && 0.0 <= c->p_max_w && !c->prosumer_id.empty();
    }
    if (const auto* d = std::get_if<SetpointDispatch>(&tx)) return !d->prosumer_id.empty();
    if (const auto* m = std::get_if<MeasurementReport>(&tx)) return !m->prosumer_id.empty();
    return false;
}

void encode_tx(ByteWriter& w, const Tx& tx) {
    if (const auto* c = std::get_if<CapacityReport>(&tx)) {
        w.u8(kTagCapacity);
        w.text16(c->prosumer_id);
        w.u32(c->interval_idx);
        w.f64(c->p_min_w);
        w.f64(c->p_max_w);
        w.u16(static_cast<std::uint16_t>(c->expected_profile_w.size()));
        for (double v : c->expected_profile_w) w.f64(v);
        return;
    }
    if (const auto* d = std::get_if<SetpointDispatch>(&tx)) {
        w.u8(kTagDispatch);
        w.text16(d->prosumer_id);
        w.u32(d->interval_idx);
        w.f64(d->p_ref_w);
        return;
    }
    const auto& m = std::get<MeasurementReport>(tx);
    w.u8(kTagMeasurement);
    w.text16(m.prosumer_id);
    w.u32(m.interval_idx);
    w.f64(m.energy_error_kwh);
    w.f64(m.mean_p_grid_w);
}

Result<Tx, ChainError> decode_tx(ByteReader& r) {
    auto tag = r.u8();
    if (!tag) return ChainError::Corrupt;
    switch (*tag) {
        case kTagCapacity: {
            CapacityReport c;
            auto id = r.text16();
            auto idx = r.u32();
            auto pmin = r.f64();
            auto pmax = r.f64();
            auto n = r.u16();
            if (!id || !idx || !pmin || !pmax || !n) return ChainError::Corrupt;
            c.prosumer_id = std::move(*id);
            c.interval_idx = *idx;
            c.p_min_w = *pmin;
            c.p_max_w = *pmax;
            c.expected_profile_w.reserve(*n);
            for (std::uint16_t i = 0; i < *n; ++i) {
                auto v = r.f64();
                if (!v) return ChainError::Corrupt;
                c.expected_profile_w.push_back(*v);
            }
            return Tx{std::move(c)};
        }
        case kTagDispatch: {
            auto id = r.text16();
            auto idx = r.u32();
            auto ref = r.f64();
            if (!id || !idx || !ref) return ChainError::Corrupt;
            return Tx{SetpointDispatch{std::move(*id), *idx, *ref}};
        }
        case kTagMeasurement: {
            auto id = r.text16();
            auto idx = r.u32();
            auto err = r.f64();
            auto mean = r.f64();
            if (!id || !idx || !err || !mean) return ChainError::Corrupt;
            return Tx{MeasurementReport{std::move(*id), *idx, *err, *mean}};
        }
        default:
            return ChainError::Corrupt;
    }
}

std::vector<std::uint8_t> canonical_block_bytes(const Block& b) {
    ByteWriter w;
    w.u64(b.index);
    w.bytes(b.prev_hash);
    w.u64(b.timestamp_us);
    w.u16(static_cast<std::uint16_t>(b.txs.size()));
    for (const auto& tx : b.txs) encode_tx(w, tx);
    for (std::size_t i = 0; i < kSignatureBytes; ++i) w.u8(0);
    return w.take();
}

Hash block_hash(const Block& b) {
    auto bytes = canonical_block_bytes(b);
    return sha256(bytes);
}

Result<const Block*, ChainError> Chain::append(std::vector<Tx> txs, std::uint64_t now_us) {
    for (const auto& tx : txs) {
        if (!tx_valid(tx)) return ChainError::BadTx;
    }
    Block b;
    b.index = blocks_.size();
    b.prev_hash = blocks_.empty() ? Hash{} : blocks_.back().hash;
    b.timestamp_us = now_us;
    b.txs = std::move(txs);
    b.hash = block_hash(b);
    blocks_.push_back(std::move(b));
    return &blocks_.back();
}

VerifyReport Chain::verify() const {
    VerifyReport rep;
    rep.block_count = blocks_.size();
    Hash prev{};
    for (std::uint64_t k = 0; k < blocks_.size(); ++k) {
        const Block& b = blocks_[k];
        if (b.index != k || b.prev_hash != prev || block_hash(b) != b.hash) {
            return VerifyReport{false, k, rep.block_count};
        }
        prev = b.hash;
    }
    return rep;
}

Result<void, ChainError> Chain::save(const std::string& path) const {
    std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) return ChainError::Io;
        for (const auto& b : blocks_) {
            auto canonical = canonical_block_bytes(b);
            ByteWriter w;
            w.u32(static_cast<std::uint32_t>(canonical.size() + b.hash.size()));
            w.bytes(canonical);
            w.bytes(b.hash);
            const auto& rec = w.data();
            f.write(reinterpret_cast<const char*>(rec.data()),
                    static_cast<std::streamsize>(rec.size()));
        }
        if (!f) return ChainError::Io;
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) return ChainError::Io;
    return {};
}

namespace {

// Reads one length-prefixed record; false on EOF or error.
bool read_record(std::ifstream& f, std::vector<std::uint8_t>& out, bool& clean_eof) {
    std::uint8_t head[4];
    f.read(reinterpret_cast<char*>(head), 4);
    if (f.gcount() == 0) {
        clean_eof = true;
        return false;
    }
    if (f.gcount() != 4) return false;
    std::uint32_t len = 0;
    for (auto b : head) len = len << 8 | b;
    if (len < 32 || len > (1u << 24)) return false;
    out.resize(len);
    f.read(reinterpret_cast<char*>(out.data()), len);
    return f.gcount() == static_cast<std::streamsize>(len);
}

Result<Block, ChainError> parse_record(const std::vector<std::uint8_t>& rec) {
    ByteReader r(std::span(rec.data(), rec.size() - 32));
    Block b;
    auto index = r.u64();
    auto prev = r.bytes(32);
    auto ts = r.u64();
    auto n = r.u16();
    if (!index || !prev || !ts || !n) return ChainError::Corrupt;
    b.index = *index;
    std::copy(prev->begin(), prev->end(), b.prev_hash.begin());
    b.timestamp_us = *ts;
    b.txs.reserve(*n);
    for (std::uint16_t i = 0; i < *n; ++i) {
        auto tx = decode_tx(r);
        if (!tx) return ChainError::Corrupt;
        b.txs.push_back(std::move(tx).take());
    }
    // Signature slot must be present and zero-filled.
    auto sig = r.bytes(kSignatureBytes);
    if (!sig || r.remaining() != 0) return ChainError::Corrupt;
    for (auto byte : *sig) {
        if (byte != 0) return ChainError::Corrupt;
    }
    std::copy(rec.end() - 32, rec.end(), b.hash.begin());
    return b;
}

}  // namespace

Result<Chain, ChainError> Chain::load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) return ChainError::Io;
    Chain chain;
    std::vector<std::uint8_t> rec;
    for (;;) {
        bool clean_eof = false;
        if (!read_record(f, rec, clean_eof)) {
            if (clean_eof) break;
            return ChainError::Corrupt;
        }
        auto b = parse_record(rec);
        if (!b) return b.error();
        chain.blocks_.push_back(std::move(b).take());
    }
    auto rep = chain.verify();
    if (!rep.ok) return ChainError::Corrupt;
    return chain;
}

VerifyReport Chain::verify_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) return VerifyReport{false, 0, 0};
    VerifyReport rep;
    Hash prev{};
    std::vector<std::uint8_t> rec;
    for (std::uint64_t k = 0;; ++k) {
        bool clean_eof = false;
        if (!read_record(f, rec, clean_eof)) {
            if (clean_eof) break;
            return VerifyReport{false, k, k};
        }
        auto parsed = parse_record(rec);
        if (!parsed) return VerifyReport{false, k, k};
        const Block& b = parsed.value();
        if (b.index != k || b.prev_hash != prev || block_hash(b) != b.hash) {
            return VerifyReport{false, k, k};
        }
        prev = b.hash;
        rep.block_count = k + 1;
    }
    return rep;
}

}  // namespace flexgate::agg
