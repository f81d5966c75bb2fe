#pragma once

#include <cstdint>
#include <string>

#include "flexgate/agg/rec_profile.hpp"
#include "flexgate/common/result.hpp"
#include "flexgate/harness/toml.hpp"
#include "flexgate/hems/controllers.hpp"
#include "flexgate/plant/config.hpp"
#include "flexgate/plant/traces.hpp"

namespace flexgate::harness {

enum class Scenario : std::uint8_t { Battery, Inverter, Load, Market };

const char* to_string(Scenario s);

struct TraceConfig {
    std::string source = "clearsky";  // clearsky | csv
    plant::ClearSkyParams day;
    std::string irradiance_csv;
    std::string temperature_csv;
    plant::LoadParams load;
    std::string load_csv;
};

struct TransportConfig {
    std::string mode = "inproc";  // inproc | net
    std::string goose_group = "239.61.8.50";
    int goose_port = 10285;
    int acsi_port = 10203;
    int broker_port = 10280;
};

struct AggregatorConfig {
    double interval_s = 900;
    double p_min_w = -2000;
    double p_max_w = 2000;
    int n_houses = 35;
    double pv_fraction = 0.6;
    double base_load_per_house_w = 800;
    double pv_peak_per_house_w = 4000;
    std::string rec_csv;  // overrides the synthetic profile when set
};

struct RunConfig {
    Scenario scenario = Scenario::Battery;
    double duration_s = 0;
    double step_s = 1.0;
    std::uint64_t seed = 1;
    double start_tod_s = 6 * 3600.0;  // simulated time of day at t = 0
    double p_ref_w = 0;               // fixed reference outside market runs

    plant::PlantConfig plant;
    hems::Preferences prefs;
    TraceConfig traces;
    TransportConfig transports;

    bool has_aggregator = false;
    AggregatorConfig aggregator;
};

// Parses and validates a full run config. Section/key errors come back with
// the scheme "section.key: message" and line 0; syntax errors keep their
// line number.
Result<RunConfig, ConfigError> parse_run_config(const TomlTable& table);
Result<RunConfig, ConfigError> load_run_config(const std::string& path);

}  // namespace flexgate::harness
