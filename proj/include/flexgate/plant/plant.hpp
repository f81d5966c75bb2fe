#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "flexgate/model/home_model.hpp"
#include "flexgate/model/server_model.hpp"
#include "flexgate/plant/config.hpp"

namespace flexgate::plant {

struct WeatherSample {
    double irr_wm2 = 0;
    double pnl_tmp_c = 25.0;
};

struct PlantState {
    double p_pv_mppt_w = 0;
    double p_pv_w = 0;     // inverter AC output, >= 0
    double p_batt_w = 0;   // + charging, - discharging
    double soc = 0.5;      // 0..1
    double p_load_w = 0;   // total consumption incl. switched loads
    double p_grid_w = 0;   // + injection to grid, - absorption
    std::vector<bool> switch_states;
};

struct PlantInputs {
    double inverter_target_w = 0;
    double batt_setpoint_w = 0;
    std::vector<bool> switch_cmds;  // resized to the configured load count
};

// Maximum-power-point output of the PV array for the given conditions.
double pv_mppt_power(double irr_wm2, double pnl_tmp_c, const PlantConfig& cfg);

// First-order lag toward the target, then clamped into [0, mppt].
double inverter_step(double target_w, double prev_out_w, double dt_s, double mppt_w,
                     const PlantConfig& cfg);

// Applies power and SOC-window limits; returns (actual power, next SOC).
std::pair<double, double> battery_step(double cmd_w, double soc, double dt_s,
                                       const PlantConfig& cfg);

inline double grid_exchange(double p_pv_w, double p_load_w, double p_batt_w) {
    return p_pv_w - p_load_w - p_batt_w;
}

// Discrete-time plant: PV array + inverter + battery + switchable loads,
// mirroring every output into the server model's MX attributes after each
// step. Command limits (MaxW, MaxWCha/MaxWDis) are re-read from the model
// each step so configuration writes take effect immediately.
class Plant {
public:
    Plant(PlantConfig cfg, std::shared_ptr<model::ServerModel> model);

    const PlantConfig& config() const { return cfg_; }
    const PlantState& state() const { return state_; }

    // Seeds the inverter output (e.g. to start a run in steady state).
    void warm_start(double p_pv_w, double soc);

    const PlantState& step(const PlantInputs& in, const WeatherSample& weather,
                           double base_load_w, double dt_s);

private:
    void mirror(const WeatherSample& weather);
    PlantConfig effective_config() const;

    PlantConfig cfg_;
    std::shared_ptr<model::ServerModel> model_;
    PlantState state_;
};

}  // namespace flexgate::plant
