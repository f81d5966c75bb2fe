#pragma once

#include <string>
#include <vector>

namespace flexgate::plant {

// One remotely switchable appliance behind the smart plug.
struct SwitchableLoad {
    std::string name = "plug1";
    double watts = 700.0;
};

struct PlantConfig {
    double pv_peak_w = 4000.0;      // rated DC output at 1000 W/m2, 25 degC
    double temp_coeff_per_c = -0.004;
    double inverter_tau_s = 10.0;
    double battery_capacity_wh = 8000.0;
    double battery_max_w = 1800.0;  // symmetric charge/discharge limit
    double soc_min = 0.10;
    double soc_max = 0.95;
    double soc_init = 0.50;
    double round_trip_eff = 1.0;
    std::vector<SwitchableLoad> switch_loads{SwitchableLoad{}};

    bool valid() const {
        bool soc_ok = 0.0 <= soc_min && soc_min < soc_max && soc_max <= 1.0 &&
                      soc_min <= soc_init && soc_init <= soc_max;
        bool pos_ok = pv_peak_w > 0 && inverter_tau_s > 0 && battery_capacity_wh > 0 &&
                      battery_max_w >= 0 && round_trip_eff > 0 && round_trip_eff <= 1.0;
        for (const auto& l : switch_loads) {
            if (l.watts < 0 || l.name.empty()) return false;
        }
        return soc_ok && pos_ok;
    }
};

}  // namespace flexgate::plant
