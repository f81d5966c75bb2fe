#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <vector>

#include "flexgate/common/result.hpp"
#include "flexgate/plant/plant.hpp"

namespace flexgate::plant {

struct IngestError {
    std::size_t line = 0;
    std::string message;
};

struct TracePoint {
    double t_s = 0;
    double value = 0;
};

// Parses "t_s,value" CSV with a mandatory header row. Times must be strictly
// increasing.
Result<std::vector<TracePoint>, IngestError> read_trace_csv(std::istream& in);
Result<std::vector<TracePoint>, IngestError> read_trace_file(const std::string& path);

// Sample-and-hold lookup: value of the last point at or before t; first
// point's value before the series starts.
class SeriesSampler {
public:
    explicit SeriesSampler(std::vector<TracePoint> points);
    double at(double t_s) const;
    bool empty() const { return points_.empty(); }

private:
    std::vector<TracePoint> points_;
};

// Idealized clear-sky day: irradiance rises and falls as a powered sine
// between sunrise and sunset; panel temperature tracks ambient plus an
// irradiance-proportional heating term.
struct ClearSkyParams {
    double sunrise_s = 6 * 3600.0;
    double sunset_s = 18 * 3600.0;
    double g_max_wm2 = 1000.0;
    double ambient_c = 20.0;
    double shape_exp = 1.2;
    double heating_c_per_wm2 = 0.03;
    double hold_s = 0;  // >0 freezes samples in blocks of this length
};

WeatherSample clearsky_at(double t_s, const ClearSkyParams& p);

// Household base demand: constant baseline plus rectangular events plus
// optional seeded uniform jitter.
struct LoadEvent {
    double start_s = 0;
    double duration_s = 0;
    double watts = 0;
};

struct LoadParams {
    double base_w = 1000.0;
    std::vector<LoadEvent> events;
    double jitter_w = 0;
    std::uint64_t seed = 1;
};

double load_at(double t_s, const LoadParams& p);  // deterministic part only

// Precomputed series over [t0, t0 + n*dt) with jitter applied; index k maps
// to t0 + k*dt.
std::vector<double> load_series(double t0_s, std::size_t steps, double dt_s,
                                const LoadParams& p);

}  // namespace flexgate::plant
