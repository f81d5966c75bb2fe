#include "flexgate/plant/plant.hpp"

#include <algorithm>
#include <cmath>

namespace flexgate::plant {

using model::FuncConstraint;
using model::WriteChannel;
namespace paths = model::paths;

double pv_mppt_power(double irr_wm2, double pnl_tmp_c, const PlantConfig& cfg) {
    double p = cfg.pv_peak_w * (irr_wm2 / 1000.0) *
               (1.0 + cfg.temp_coeff_per_c * (pnl_tmp_c - 25.0));
    return std::max(0.0, p);
}

double inverter_step(double target_w, double prev_out_w, double dt_s, double mppt_w,
                     const PlantConfig& cfg) {
    double out = prev_out_w + (target_w - prev_out_w) * (1.0 - std::exp(-dt_s / cfg.inverter_tau_s));
    return std::clamp(out, 0.0, mppt_w);
}

std::pair<double, double> battery_step(double cmd_w, double soc, double dt_s,
                                       const PlantConfig& cfg) {
    double p = std::clamp(cmd_w, -cfg.battery_max_w, cfg.battery_max_w);
    double cap_ws = cfg.battery_capacity_wh * 3600.0;
    double eff = std::sqrt(cfg.round_trip_eff);
    if (p > 0) {
        // Charging: stored power is p * eff; cap at the SOC ceiling.
        double p_max = (cfg.soc_max - soc) * cap_ws / (eff * dt_s);
        p = std::min(p, std::max(0.0, p_max));
        return {p, soc + p * eff * dt_s / cap_ws};
    }
    if (p < 0) {
        // Discharging: drawn power is p / eff; cap at the SOC floor.
        double p_min = (cfg.soc_min - soc) * cap_ws * eff / dt_s;
        p = std::max(p, std::min(0.0, p_min));
        return {p, soc + p * dt_s / (eff * cap_ws)};
    }
    return {0.0, soc};
}

Plant::Plant(PlantConfig cfg, std::shared_ptr<model::ServerModel> model)
    : cfg_(std::move(cfg)), model_(std::move(model)) {
    state_.soc = cfg_.soc_init;
    state_.switch_states.assign(cfg_.switch_loads.size(), false);
}

void Plant::warm_start(double p_pv_w, double soc) {
    state_.p_pv_w = p_pv_w;
    state_.soc = soc;
}

PlantConfig Plant::effective_config() const {
    PlantConfig c = cfg_;
    auto rd = [&](const char* path, double fallback) {
        auto r = model_->read(path);
        if (!r) return fallback;
        if (auto* f = std::get_if<float>(&r.value().first)) return static_cast<double>(*f);
        return fallback;
    };
    c.pv_peak_w = cfg_.pv_peak_w;
    double max_w = rd(paths::kInvMaxW, cfg_.pv_peak_w);
    c.pv_peak_w = std::min(cfg_.pv_peak_w, std::max(0.0, max_w));
    double cha = rd(paths::kBatMaxCha, cfg_.battery_max_w);
    double dis = rd(paths::kBatMaxDis, cfg_.battery_max_w);
    c.battery_max_w = std::max(0.0, std::min({cfg_.battery_max_w, cha, dis}));
    return c;
}

const PlantState& Plant::step(const PlantInputs& in, const WeatherSample& weather,
                              double base_load_w, double dt_s) {
    PlantConfig eff = effective_config();

    double mppt = pv_mppt_power(weather.irr_wm2, weather.pnl_tmp_c, cfg_);
    double target = std::clamp(in.inverter_target_w, 0.0, std::min(mppt, eff.pv_peak_w));
    double p_pv = inverter_step(target, state_.p_pv_w, dt_s, mppt, eff);

    auto [p_batt, soc_next] = battery_step(in.batt_setpoint_w, state_.soc, dt_s, eff);

    double p_load = base_load_w;
    state_.switch_states.resize(cfg_.switch_loads.size(), false);
    for (std::size_t i = 0; i < cfg_.switch_loads.size(); ++i) {
        bool on = i < in.switch_cmds.size() ? in.switch_cmds[i] : false;
        state_.switch_states[i] = on;
        if (on) p_load += cfg_.switch_loads[i].watts;
    }

    state_.p_pv_mppt_w = mppt;
    state_.p_pv_w = p_pv;
    state_.p_batt_w = p_batt;
    state_.soc = soc_next;
    state_.p_load_w = p_load;
    state_.p_grid_w = grid_exchange(p_pv, p_load, p_batt);

    mirror(weather);
    return state_;
}

void Plant::mirror(const WeatherSample& weather) {
    auto wf = [&](const char* path, double v) {
        model_->write(path, static_cast<float>(v), WriteChannel::Plant);
    };
    wf(paths::kIrr, weather.irr_wm2);
    wf(paths::kPnlTmp, weather.pnl_tmp_c);
    wf(paths::kPvMpptW, state_.p_pv_mppt_w);
    wf(paths::kPvTotW, state_.p_pv_w);
    wf(paths::kBatW, state_.p_batt_w);
    wf(paths::kSocPct, state_.soc * 100.0);
    wf(paths::kLoadTotW, state_.p_load_w);
    for (std::size_t i = 0; i < cfg_.switch_loads.size(); ++i) {
        double w = state_.switch_states[i] ? cfg_.switch_loads[i].watts : 0.0;
        model_->write(paths::switch_load_tot_w(i), static_cast<float>(w), WriteChannel::Plant);
    }
    wf(paths::kGridW, state_.p_grid_w);
}

}  // namespace flexgate::plant
