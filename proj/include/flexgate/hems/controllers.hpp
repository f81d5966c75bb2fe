#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "flexgate/plant/plant.hpp"

namespace flexgate::hems {

// Daily time window, seconds since midnight, [start, end).
struct Window {
    double start_s = 0;
    double end_s = 0;
};

struct Preferences {
    double cap_w = 2000.0;           // symmetric exchange capacity
    double switch_budget_s = 7200.0;  // daily ON-time budget
    double min_switch_hold_s = 300.0;
    std::vector<Window> switch_windows;  // empty = always allowed

    bool in_window(double t_s) const {
        if (switch_windows.empty()) return true;
        double day = 86400.0;
        double tod = t_s - std::floor(t_s / day) * day;
        for (const auto& w : switch_windows) {
            if (tod >= w.start_s && tod < w.end_s) return true;
        }
        return false;
    }
};

// Scenario 1: battery absorbs surplus / covers deficit so the grid exchange
// tracks the reference. Positive setpoint = charge.
inline double battery_controller(double p_pv_w, double p_load_w, double p_ref_grid_w) {
    return p_pv_w - p_load_w - p_ref_grid_w;
}

// Scenario 2: inverter output adjusted to match demand plus battery draw plus
// the requested exchange, limited by the available maximum power point.
inline double curtailment_controller(double p_load_w, double p_batt_w, double p_ref_grid_w,
                                     double mppt_w) {
    return std::clamp(p_load_w + p_batt_w + p_ref_grid_w, 0.0, mppt_w);
}

// Scenario 3: hysteresis switch for one controllable load. ON after the
// surplus (measured with the load off) has covered the load size continuously
// for the hold time, inside a window, with budget left; OFF on sustained
// shortfall, window exit or budget exhaustion. Daily budget compliance is
// exact: ON time never exceeds the budget.
class LoadController {
public:
    LoadController(Preferences prefs, double switch_load_w);

    // One control step at sample time t covering [t, t + dt). Returns the
    // commanded state for that step.
    bool step(double surplus_w, double t_s, double dt_s);

    bool state() const { return on_; }
    double budget_used_s() const { return budget_used_s_; }

private:
    void roll_day(double t_s);

    Preferences prefs_;
    double load_w_;
    bool on_ = false;
    double above_start_ = -1;
    double below_start_ = -1;
    double last_toggle_ = -1e300;
    double budget_used_s_ = 0;
    double day_idx_ = -1e300;
};

struct MarketDecision {
    double batt_setpoint_w = 0;
    double inverter_target_w = 0;
    bool switch_on = false;
    double predicted_grid_w = 0;
    double predicted_err_w = 0;
};

// Scenario 4: per-step coordination of battery, curtailment and the
// switchable load against an aggregator reference. Both switch branches are
// evaluated with the plant's own battery feasibility kernel; the branch with
// the smaller predicted |pGrid - pRef| wins, ties fall to off.
class MarketTracker {
public:
    MarketTracker(Preferences prefs, plant::PlantConfig plant_cfg, double switch_load_w);

    MarketDecision step(double p_ref_w, double mppt_w, double base_load_w, double soc,
                        double t_s, double dt_s);

    double budget_used_s() const { return budget_used_s_; }

private:
    MarketDecision evaluate(bool sw, double p_ref_w, double mppt_w, double base_load_w,
                            double soc, double dt_s) const;
    void roll_day(double t_s);

    Preferences prefs_;
    plant::PlantConfig plant_cfg_;
    double load_w_;
    double budget_used_s_ = 0;
    double day_idx_ = -1e300;
};

struct TrackingRecord {
    double t_s = 0;
    double p_grid_w = 0;
    double p_ref_w = 0;
};

// Accumulated |pGrid - pRef| energy in kWh over uniformly spaced records.
double error_integral_kwh(std::span<const TrackingRecord> records, double dt_s);

}  // namespace flexgate::hems
