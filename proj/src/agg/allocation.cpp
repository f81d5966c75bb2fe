#include "flexgate/agg/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace flexgate::agg {

std::map<std::string, CapacityEnvelope> collect_capacities(const Chain& chain,
                                                           std::uint32_t interval_idx) {
    std::map<std::string, CapacityEnvelope> out;
    for (const auto& block : chain.blocks()) {
        for (const auto& tx : block.txs) {
            if (const auto* c = std::get_if<CapacityReport>(&tx)) {
                if (c->interval_idx == interval_idx) {
                    out[c->prosumer_id] = CapacityEnvelope{c->p_min_w, c->p_max_w};
                }
            }
        }
    }
    return out;
}

Result<std::map<std::string, double>, AllocError> allocate_setpoints(
    double p_rec_w, const std::map<std::string, CapacityEnvelope>& capacities) {
    if (capacities.empty()) return AllocError::EmptyCapacities;

    std::vector<std::string> ids;
    std::vector<CapacityEnvelope> env;
    for (const auto& [id, e] : capacities) {
        ids.push_back(id);
        env.push_back(e);
    }
    const std::size_t n = ids.size();

    double sum_min = 0, sum_max = 0;
    for (const auto& e : env) {
        sum_min += e.p_min_w;
        sum_max += e.p_max_w;
    }
    double target = std::clamp(-p_rec_w, sum_min, sum_max);

    std::vector<double> alloc(n, 0.0);
    std::vector<bool> frozen(n, false);
    double remaining = target;
    const double eps = 1e-9 * std::max(1.0, std::abs(target));

    for (std::size_t round = 0; round <= n; ++round) {
        if (std::abs(remaining) <= eps) break;
        std::vector<double> w(n, 0.0);
        double wsum = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (frozen[i]) continue;
            w[i] = std::min(-env[i].p_min_w, env[i].p_max_w);
            wsum += w[i];
        }
        if (wsum <= 0) {
            // All symmetric caps are zero; fall back to one-sided headroom in
            // the direction still needed so the target is conserved.
            for (std::size_t i = 0; i < n; ++i) {
                if (frozen[i]) continue;
                w[i] = remaining > 0 ? env[i].p_max_w - alloc[i] : alloc[i] - env[i].p_min_w;
                w[i] = std::max(0.0, w[i]);
                wsum += w[i];
            }
        }
        if (wsum <= 0) break;

        bool violated = false;
        std::vector<double> share(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            if (frozen[i] || w[i] <= 0) continue;
            share[i] = remaining * w[i] / wsum;
            double next = alloc[i] + share[i];
            if (next > env[i].p_max_w + eps || next < env[i].p_min_w - eps) violated = true;
        }
        if (!violated) {
            for (std::size_t i = 0; i < n; ++i) {
                if (!frozen[i]) alloc[i] += share[i];
            }
            remaining = 0;
            break;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (frozen[i] || w[i] <= 0) continue;
            double next = alloc[i] + share[i];
            if (next > env[i].p_max_w + eps) {
                alloc[i] = env[i].p_max_w;
                frozen[i] = true;
            } else if (next < env[i].p_min_w - eps) {
                alloc[i] = env[i].p_min_w;
                frozen[i] = true;
            }
        }
        double assigned = 0;
        for (double a : alloc) assigned += a;
        remaining = target - assigned;
    }

    std::map<std::string, double> out;
    for (std::size_t i = 0; i < n; ++i) {
        out[ids[i]] = std::clamp(alloc[i], env[i].p_min_w, env[i].p_max_w);
    }
    return out;
}

Result<const Block*, ChainError> dispatch(
    Chain& chain, const std::vector<std::pair<std::string, double>>& allocations,
    std::uint32_t interval_idx, std::uint64_t now_us) {
    if (allocations.empty()) return static_cast<const Block*>(nullptr);
    std::set<std::string> seen;
    std::vector<Tx> txs;
    txs.reserve(allocations.size());
    for (const auto& [id, p_ref] : allocations) {
        if (!seen.insert(id).second) return ChainError::DuplicateProsumer;
        txs.push_back(SetpointDispatch{id, interval_idx, p_ref});
    }
    return chain.append(std::move(txs), now_us);
}

Result<const Block*, ChainError> dispatch(Chain& chain,
                                          const std::map<std::string, double>& allocations,
                                          std::uint32_t interval_idx, std::uint64_t now_us) {
    std::vector<std::pair<std::string, double>> v(allocations.begin(), allocations.end());
    return dispatch(chain, v, interval_idx, now_us);
}

std::optional<double> find_dispatch(const Chain& chain, const std::string& prosumer_id,
                                    std::uint32_t interval_idx,
                                    std::uint64_t scan_from_index) {
    std::optional<double> found;
    for (std::uint64_t k = scan_from_index; k < chain.size(); ++k) {
        for (const auto& tx : chain.blocks()[k].txs) {
            if (const auto* d = std::get_if<SetpointDispatch>(&tx)) {
                if (d->prosumer_id == prosumer_id && d->interval_idx == interval_idx) {
                    found = d->p_ref_w;
                }
            }
        }
    }
    return found;
}

}  // namespace flexgate::agg
