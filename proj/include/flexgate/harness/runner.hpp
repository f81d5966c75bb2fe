#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "flexgate/common/result.hpp"
#include "flexgate/harness/config.hpp"

namespace flexgate::harness {

struct IntervalMetrics {
    std::uint32_t idx = 0;
    double p_ref_w = 0;
    double mean_grid_w = 0;
    double error_kwh = 0;
};

struct RunMetrics {
    double energy_error_kwh = 0;
    double energy_error_no_control_kwh = 0;  // load scenario: same run, switch held off
    double injected_kwh = 0;
    double absorbed_kwh = 0;
    double switch_on_seconds = 0;
    double soc_start = 0;
    double soc_end = 0;
    std::uint64_t steps = 0;
    std::uint64_t goose_frames_delivered = 0;
    std::vector<IntervalMetrics> intervals;  // market runs only
};

struct RunError {
    std::string message;
};

// Runs one scenario end to end: builds the model, plant, event bus, broker
// and bridge, steps the controllers on the simulation clock, and writes
// run.csv plus metrics.json (and chain.log for market runs) into out_dir.
Result<RunMetrics, RunError> run_scenario(const RunConfig& cfg, const std::string& out_dir);

}  // namespace flexgate::harness
