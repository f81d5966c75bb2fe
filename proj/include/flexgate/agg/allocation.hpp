#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "flexgate/agg/ledger.hpp"
#include "flexgate/common/result.hpp"

namespace flexgate::agg {

struct CapacityEnvelope {
    double p_min_w = 0;  // <= 0
    double p_max_w = 0;  // >= 0
};

enum class AllocError : std::uint8_t { EmptyCapacities };

// Latest CapacityReport per prosumer for the interval; later blocks (and
// later txs within a block) win.
std::map<std::string, CapacityEnvelope> collect_capacities(const Chain& chain,
                                                           std::uint32_t interval_idx);

// Proportional counteraction of the REC exchange: target = clamp(-pRecW,
// sum pMin, sum pMax), split by cap_i = min(|pMin_i|, pMax_i) with iterative
// redistribution when clamps bind. Conserves the clamped target exactly.
Result<std::map<std::string, double>, AllocError> allocate_setpoints(
    double p_rec_w, const std::map<std::string, CapacityEnvelope>& capacities);

// Appends one block holding a SetpointDispatch per prosumer. Returns nullptr
// without appending when allocations are empty; rejects duplicate prosumers.
Result<const Block*, ChainError> dispatch(
    Chain& chain, const std::vector<std::pair<std::string, double>>& allocations,
    std::uint32_t interval_idx, std::uint64_t now_us);
Result<const Block*, ChainError> dispatch(Chain& chain,
                                          const std::map<std::string, double>& allocations,
                                          std::uint32_t interval_idx, std::uint64_t now_us);

// Latest dispatched reference for one prosumer and interval, scanning blocks
// from scan_from_index on.
std::optional<double> find_dispatch(const Chain& chain, const std::string& prosumer_id,
                                    std::uint32_t interval_idx,
                                    std::uint64_t scan_from_index = 0);

}  // namespace flexgate::agg
