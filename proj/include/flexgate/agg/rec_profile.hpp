#pragma once

#include <string>
#include <vector>

#include "flexgate/common/result.hpp"
#include "flexgate/plant/config.hpp"
#include "flexgate/plant/traces.hpp"

namespace flexgate::agg {

// Community net exchange per 15-minute interval; + = injection into the
// upstream grid.
struct RecProfile {
    double interval_s = 900.0;
    std::vector<double> p_rec_w;
};

struct RecSynthParams {
    int n_houses = 35;
    double pv_fraction = 0.6;
    double base_load_per_house_w = 800.0;
    double pv_peak_per_house_w = 4000.0;
    plant::ClearSkyParams day;
};

// Synthetic community profile: PV share of houses at the clear-sky maximum
// power point minus the aggregate baseline, averaged per interval.
RecProfile rec_profile_synth(const RecSynthParams& p, double duration_s,
                             double interval_s = 900.0);

// "interval_idx,p_rec_w" CSV with header; indices must run 0..N-1 in order.
Result<RecProfile, plant::IngestError> rec_profile_from_csv(const std::string& path,
                                                            double interval_s = 900.0);

}  // namespace flexgate::agg
