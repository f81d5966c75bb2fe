#include "flexgate/hems/controllers.hpp"

#include <algorithm>

namespace flexgate::hems {

LoadController::LoadController(Preferences prefs, double switch_load_w)
    : prefs_(std::move(prefs)), load_w_(switch_load_w) {}

void LoadController::roll_day(double t_s) {
    double d = std::floor(t_s / 86400.0);
    if (d != day_idx_) {
        day_idx_ = d;
        budget_used_s_ = 0;
    }
}

bool LoadController::step(double surplus_w, double t_s, double dt_s) {
    roll_day(t_s);

    if (surplus_w >= load_w_) {
        if (above_start_ < 0) above_start_ = t_s;
        below_start_ = -1;
    } else {
        if (below_start_ < 0) below_start_ = t_s;
        above_start_ = -1;
    }

    bool in_window = prefs_.in_window(t_s);
    bool budget_left = budget_used_s_ + dt_s <= prefs_.switch_budget_s;
    bool hold_ok = t_s - last_toggle_ >= prefs_.min_switch_hold_s;

    if (on_) {
        bool sustained_shortfall =
            below_start_ >= 0 && t_s - below_start_ >= prefs_.min_switch_hold_s;
        if (!budget_left || !in_window || (sustained_shortfall && hold_ok)) {
            on_ = false;
            last_toggle_ = t_s;
        }
    } else {
        bool sustained_surplus =
            above_start_ >= 0 && t_s - above_start_ >= prefs_.min_switch_hold_s;
        if (sustained_surplus && in_window && budget_left && hold_ok) {
            on_ = true;
            last_toggle_ = t_s;
        }
    }

    if (on_) budget_used_s_ += dt_s;
    return on_;
}

MarketTracker::MarketTracker(Preferences prefs, plant::PlantConfig plant_cfg,
                             double switch_load_w)
    : prefs_(std::move(prefs)), plant_cfg_(std::move(plant_cfg)), load_w_(switch_load_w) {}

void MarketTracker::roll_day(double t_s) {
    double d = std::floor(t_s / 86400.0);
    if (d != day_idx_) {
        day_idx_ = d;
        budget_used_s_ = 0;
    }
}

MarketDecision MarketTracker::evaluate(bool sw, double p_ref_w, double mppt_w,
                                       double base_load_w, double soc, double dt_s) const {
    MarketDecision d;
    d.switch_on = sw;
    double load = base_load_w + (sw ? load_w_ : 0.0);
    double cmd = std::clamp(mppt_w - load - p_ref_w, -plant_cfg_.battery_max_w,
                            plant_cfg_.battery_max_w);
    auto [batt_act, soc_next] = plant::battery_step(cmd, soc, dt_s, plant_cfg_);
    (void)soc_next;
    d.batt_setpoint_w = cmd;
    double grid_full = mppt_w - load - batt_act;
    if (grid_full > p_ref_w) {
        d.inverter_target_w = std::clamp(load + batt_act + p_ref_w, 0.0, mppt_w);
    } else {
        d.inverter_target_w = mppt_w;
    }
    d.predicted_grid_w = d.inverter_target_w - load - batt_act;
    d.predicted_err_w = std::abs(d.predicted_grid_w - p_ref_w);
    return d;
}

MarketDecision MarketTracker::step(double p_ref_w, double mppt_w, double base_load_w,
                                   double soc, double t_s, double dt_s) {
    roll_day(t_s);
    MarketDecision off = evaluate(false, p_ref_w, mppt_w, base_load_w, soc, dt_s);

    bool on_allowed =
        prefs_.in_window(t_s) && budget_used_s_ + dt_s <= prefs_.switch_budget_s;
    MarketDecision chosen = off;
    if (on_allowed) {
        MarketDecision on = evaluate(true, p_ref_w, mppt_w, base_load_w, soc, dt_s);
        if (on.predicted_err_w < off.predicted_err_w) chosen = on;
    }
    if (chosen.switch_on) budget_used_s_ += dt_s;
    return chosen;
}

double error_integral_kwh(std::span<const TrackingRecord> records, double dt_s) {
    double sum = 0;
    for (const auto& r : records) sum += std::abs(r.p_grid_w - r.p_ref_w) * dt_s;
    return sum / 3.6e6;
}

}  // namespace flexgate::hems
