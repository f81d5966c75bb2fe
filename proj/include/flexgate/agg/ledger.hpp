#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "flexgate/common/bytes.hpp"
#include "flexgate/common/clock.hpp"
#include "flexgate/common/result.hpp"

namespace flexgate::agg {

struct CapacityReport {
    std::string prosumer_id;
    std::uint32_t interval_idx = 0;
    double p_min_w = 0;  // <= 0, absorption capacity
    double p_max_w = 0;  // >= 0, injection capacity
    std::vector<double> expected_profile_w;

    friend bool operator==(const CapacityReport&, const CapacityReport&) = default;
};

struct SetpointDispatch {
    std::string prosumer_id;
    std::uint32_t interval_idx = 0;
    double p_ref_w = 0;

    friend bool operator==(const SetpointDispatch&, const SetpointDispatch&) = default;
};

struct MeasurementReport {
    std::string prosumer_id;
    std::uint32_t interval_idx = 0;
    double energy_error_kwh = 0;
    double mean_p_grid_w = 0;

    friend bool operator==(const MeasurementReport&, const MeasurementReport&) = default;
};

using Tx = std::variant<CapacityReport, SetpointDispatch, MeasurementReport>;

using Hash = std::array<std::uint8_t, 32>;

Hash sha256(std::span<const std::uint8_t> bytes);
std::string to_hex(const Hash& h);

struct Block {
    std::uint64_t index = 0;
    Hash prev_hash{};  // zero for genesis
    std::uint64_t timestamp_us = 0;
    std::vector<Tx> txs;
    Hash hash{};  // SHA-256 of the canonical serialization

    friend bool operator==(const Block&, const Block&) = default;
};

enum class ChainError : std::uint8_t {
    BadTx,
    DuplicateProsumer,
    EmptyDispatch,
    Io,
    Corrupt,
};

const char* to_string(ChainError e);

// Canonical wire form: fields in declaration order, big-endian integers,
// text as u16 length + UTF-8, lists as u16 count + items, f64 as raw IEEE
// bits. A 64-byte zero-filled signature slot terminates each block.
void encode_tx(ByteWriter& w, const Tx& tx);
Result<Tx, ChainError> decode_tx(ByteReader& r);
std::vector<std::uint8_t> canonical_block_bytes(const Block& b);
Hash block_hash(const Block& b);
bool tx_valid(const Tx& tx);

inline constexpr std::size_t kSignatureBytes = 64;

struct VerifyReport {
    bool ok = true;
    std::uint64_t first_bad_index = 0;
    std::uint64_t block_count = 0;
};

// Append-only single-writer hash chain.
class Chain {
public:
    Chain() = default;

    const std::vector<Block>& blocks() const { return blocks_; }
    std::size_t size() const { return blocks_.size(); }

    Result<const Block*, ChainError> append(std::vector<Tx> txs, std::uint64_t now_us);
    VerifyReport verify() const;

    Result<void, ChainError> save(const std::string& path) const;
    static Result<Chain, ChainError> load(const std::string& path);

    // Streaming verification straight off the file; reports the index of the
    // first bad or unreadable block.
    static VerifyReport verify_file(const std::string& path);

private:
    std::vector<Block> blocks_;
};

}  // namespace flexgate::agg
