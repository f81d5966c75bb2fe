#include "flexgate/harness/config.hpp"

namespace flexgate::harness {

namespace {

struct Ctx {
    const TomlTable& table;
    std::string error;

    bool fail(const std::string& where, const std::string& message) {
        if (error.empty()) error = where + ": " + message;
        return false;
    }

    const TomlValue* find(const std::string& section, const std::string& key) {
        auto s = table.find(section);
        if (s == table.end()) return nullptr;
        auto k = s->second.find(key);
        if (k == s->second.end()) return nullptr;
        return &k->second;
    }

    bool num(const std::string& section, const std::string& key, double& out) {
        const TomlValue* v = find(section, key);
        if (!v) return true;
        if (v->kind != TomlValue::Kind::Number) {
            return fail(section + "." + key, "expected a number");
        }
        out = v->number;
        return true;
    }

    bool integer(const std::string& section, const std::string& key, int& out) {
        double d = out;
        if (!num(section, key, d)) return false;
        out = static_cast<int>(d);
        return true;
    }

    bool u64(const std::string& section, const std::string& key, std::uint64_t& out) {
        double d = static_cast<double>(out);
        if (!num(section, key, d)) return false;
        if (d < 0) return fail(section + "." + key, "must be >= 0");
        out = static_cast<std::uint64_t>(d);
        return true;
    }

    bool str(const std::string& section, const std::string& key, std::string& out) {
        const TomlValue* v = find(section, key);
        if (!v) return true;
        if (v->kind != TomlValue::Kind::String) {
            return fail(section + "." + key, "expected a string");
        }
        out = v->text;
        return true;
    }

    bool boolean(const std::string& section, const std::string& key, bool& out) {
        const TomlValue* v = find(section, key);
        if (!v) return true;
        if (v->kind != TomlValue::Kind::Bool) {
            return fail(section + "." + key, "expected true or false");
        }
        out = v->boolean;
        return true;
    }
};

bool parse_load_events(Ctx& c, RunConfig& cfg) {
    const TomlValue* v = c.find("traces", "load_events");
    if (!v) return true;
    if (v->kind != TomlValue::Kind::Array) {
        return c.fail("traces.load_events", "expected an array of [start_s, duration_s, watts]");
    }
    for (const auto& item : v->items) {
        if (item.kind != TomlValue::Kind::Array || item.items.size() != 3 ||
            item.items[0].kind != TomlValue::Kind::Number ||
            item.items[1].kind != TomlValue::Kind::Number ||
            item.items[2].kind != TomlValue::Kind::Number) {
            return c.fail("traces.load_events", "each event is [start_s, duration_s, watts]");
        }
        cfg.traces.load.events.push_back(plant::LoadEvent{
            item.items[0].number, item.items[1].number, item.items[2].number});
    }
    return true;
}

bool parse_all(Ctx& c, RunConfig& cfg) {
    std::string scenario = "battery";
    if (!c.str("run", "scenario", scenario)) return false;
    if (scenario == "battery") {
        cfg.scenario = Scenario::Battery;
    } else if (scenario == "inverter") {
        cfg.scenario = Scenario::Inverter;
    } else if (scenario == "load") {
        cfg.scenario = Scenario::Load;
    } else if (scenario == "market") {
        cfg.scenario = Scenario::Market;
    } else {
        return c.fail("run.scenario", "must be battery, inverter, load or market");
    }
    if (!c.num("run", "duration_s", cfg.duration_s)) return false;
    if (!c.num("run", "step_s", cfg.step_s)) return false;
    if (!c.u64("run", "seed", cfg.seed)) return false;
    if (!c.num("run", "start_tod_s", cfg.start_tod_s)) return false;
    if (!c.num("run", "p_ref_w", cfg.p_ref_w)) return false;

    auto& p = cfg.plant;
    if (!c.num("plant", "pv_peak_w", p.pv_peak_w)) return false;
    if (!c.num("plant", "temp_coeff_per_c", p.temp_coeff_per_c)) return false;
    if (!c.num("plant", "inverter_tau_s", p.inverter_tau_s)) return false;
    if (!c.num("plant", "battery_capacity_wh", p.battery_capacity_wh)) return false;
    if (!c.num("plant", "battery_max_w", p.battery_max_w)) return false;
    if (!c.num("plant", "soc_min", p.soc_min)) return false;
    if (!c.num("plant", "soc_max", p.soc_max)) return false;
    if (!c.num("plant", "soc_init", p.soc_init)) return false;
    if (!c.num("plant", "round_trip_eff", p.round_trip_eff)) return false;
    double switch_w = p.switch_loads.empty() ? 700.0 : p.switch_loads[0].watts;
    if (!c.num("plant", "switch_load_w", switch_w)) return false;
    p.switch_loads = {plant::SwitchableLoad{"plug1", switch_w}};

    auto& pr = cfg.prefs;
    if (!c.num("preferences", "cap_w", pr.cap_w)) return false;
    if (!c.num("preferences", "switch_budget_s", pr.switch_budget_s)) return false;
    if (!c.num("preferences", "min_switch_hold_s", pr.min_switch_hold_s)) return false;
    double win_start = 0, win_end = 86400;
    if (!c.num("preferences", "switch_window_start_s", win_start)) return false;
    if (!c.num("preferences", "switch_window_end_s", win_end)) return false;
    pr.switch_windows = {hems::Window{win_start, win_end}};

    auto& tr = cfg.traces;
    if (!c.str("traces", "source", tr.source)) return false;
    if (!c.num("traces", "sunrise_s", tr.day.sunrise_s)) return false;
    if (!c.num("traces", "sunset_s", tr.day.sunset_s)) return false;
    if (!c.num("traces", "g_max_wm2", tr.day.g_max_wm2)) return false;
    if (!c.num("traces", "ambient_c", tr.day.ambient_c)) return false;
    if (!c.num("traces", "weather_hold_s", tr.day.hold_s)) return false;
    if (!c.str("traces", "irradiance_csv", tr.irradiance_csv)) return false;
    if (!c.str("traces", "temperature_csv", tr.temperature_csv)) return false;
    if (!c.num("traces", "base_load_w", tr.load.base_w)) return false;
    if (!c.num("traces", "load_jitter_w", tr.load.jitter_w)) return false;
    if (!c.str("traces", "load_csv", tr.load_csv)) return false;
    if (!parse_load_events(c, cfg)) return false;
    tr.load.seed = cfg.seed;

    auto& tp = cfg.transports;
    if (!c.str("transports", "mode", tp.mode)) return false;
    if (!c.str("transports", "goose_group", tp.goose_group)) return false;
    if (!c.integer("transports", "goose_port", tp.goose_port)) return false;
    if (!c.integer("transports", "acsi_port", tp.acsi_port)) return false;
    if (!c.integer("transports", "broker_port", tp.broker_port)) return false;

    cfg.has_aggregator = c.table.count("aggregator") > 0;
    auto& ag = cfg.aggregator;
    if (!c.num("aggregator", "interval_s", ag.interval_s)) return false;
    if (!c.num("aggregator", "p_min_w", ag.p_min_w)) return false;
    if (!c.num("aggregator", "p_max_w", ag.p_max_w)) return false;
    if (!c.integer("aggregator", "n_houses", ag.n_houses)) return false;
    if (!c.num("aggregator", "pv_fraction", ag.pv_fraction)) return false;
    if (!c.num("aggregator", "base_load_per_house_w", ag.base_load_per_house_w)) return false;
    if (!c.num("aggregator", "pv_peak_per_house_w", ag.pv_peak_per_house_w)) return false;
    if (!c.str("aggregator", "rec_csv", ag.rec_csv)) return false;
    return true;
}

bool validate(Ctx& c, const RunConfig& cfg) {
    if (cfg.duration_s <= 0) return c.fail("run.duration_s", "must be > 0");
    if (cfg.step_s <= 0) return c.fail("run.step_s", "must be > 0");
    if (!cfg.plant.valid()) return c.fail("plant", "invalid plant parameters");
    if (cfg.traces.source != "clearsky" && cfg.traces.source != "csv") {
        return c.fail("traces.source", "must be clearsky or csv");
    }
    if (cfg.traces.source == "csv" && cfg.traces.irradiance_csv.empty()) {
        return c.fail("traces.irradiance_csv", "required when source = \"csv\"");
    }
    if (cfg.transports.mode != "inproc" && cfg.transports.mode != "net") {
        return c.fail("transports.mode", "must be inproc or net");
    }
    if (cfg.scenario == Scenario::Market) {
        if (!cfg.has_aggregator) {
            return c.fail("aggregator", "section required for scenario = \"market\"");
        }
        if (cfg.aggregator.interval_s <= 0) return c.fail("aggregator.interval_s", "must be > 0");
        if (cfg.aggregator.p_min_w > 0 || cfg.aggregator.p_max_w < 0) {
            return c.fail("aggregator", "p_min_w must be <= 0 and p_max_w >= 0");
        }
    }
    return true;
}

}  // namespace

const char* to_string(Scenario s) {
    switch (s) {
        case Scenario::Battery: return "battery";
        case Scenario::Inverter: return "inverter";
        case Scenario::Load: return "load";
        case Scenario::Market: return "market";
    }
    return "?";
}

Result<RunConfig, ConfigError> parse_run_config(const TomlTable& table) {
    Ctx c{table, {}};
    RunConfig cfg;
    if (!parse_all(c, cfg) || !validate(c, cfg)) return ConfigError{0, c.error};
    return cfg;
}

Result<RunConfig, ConfigError> load_run_config(const std::string& path) {
    auto table = parse_toml_file(path);
    if (!table) return table.error();
    return parse_run_config(table.value());
}

}  // namespace flexgate::harness
