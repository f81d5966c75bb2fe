#include "flexgate/harness/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <thread>

#include <nlohmann/json.hpp>

#include "flexgate/acsi/server.hpp"
#include "flexgate/agg/allocation.hpp"
#include "flexgate/agg/ledger.hpp"
#include "flexgate/agg/rec_profile.hpp"
#include "flexgate/bridge/i61850_agent.hpp"
#include "flexgate/bridge/model_link.hpp"
#include "flexgate/broker/service.hpp"
#include "flexgate/broker/store.hpp"
#include "flexgate/goose/mirror.hpp"
#include "flexgate/goose/publisher.hpp"
#include "flexgate/goose/subscriber.hpp"
#include "flexgate/goose/transport.hpp"
#include "flexgate/hems/controllers.hpp"
#include "flexgate/model/home_model.hpp"
#include "flexgate/plant/plant.hpp"
#include "flexgate/plant/traces.hpp"

namespace flexgate::harness {

namespace {

// Fixed simulation epoch so in-process runs are reproducible bit for bit.
constexpr std::uint64_t kSimEpochUs = 1'700'000'000'000'000ULL;

constexpr const char* kProsumerId = "home1";

// Commands cross the model as Float32 attributes; the plant therefore sees
// the quantized value. Predictions must apply the same rounding.
double q32(double x) { return static_cast<double>(static_cast<float>(x)); }

std::string csv_row(double t_s, const plant::PlantState& st, double p_ref_w) {
    int on = 0;
    for (bool s : st.switch_states) on += s ? 1 : 0;
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%.3f,%.9f,%.9f,%.9f,%.9f,%.9f,%.9f,%.9f,%d\n", t_s,
                  st.p_load_w, st.p_pv_w, st.p_pv_mppt_w, st.p_batt_w, st.p_grid_w, p_ref_w,
                  st.soc * 100.0, on);
    return buf;
}

struct IntervalAccum {
    std::uint32_t idx = 0;
    double p_ref_w = 0;
    double grid_sum_w = 0;
    double err_kwh = 0;
    std::uint64_t samples = 0;
};

Result<plant::SeriesSampler, RunError> load_sampler(const std::string& path,
                                                    const char* what) {
    auto trace = plant::read_trace_file(path);
    if (!trace) {
        return RunError{std::string(what) + " trace " + path + ": line " +
                        std::to_string(trace.error().line) + ": " + trace.error().message};
    }
    return plant::SeriesSampler(std::move(trace).take());
}

}  // namespace

Result<RunMetrics, RunError> run_scenario(const RunConfig& cfg, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) return RunError{"cannot create output directory " + out_dir};

    const bool inproc = cfg.transports.mode == "inproc";
    const double dt = cfg.step_s;
    const auto steps = static_cast<std::uint64_t>(std::llround(cfg.duration_s / dt));
    if (steps == 0) return RunError{"duration shorter than one step"};

    std::shared_ptr<ManualClock> sim_clock;
    std::shared_ptr<Clock> clock;
    if (inproc) {
        sim_clock = std::make_shared<ManualClock>(kSimEpochUs);
        clock = sim_clock;
    } else {
        clock = wall_clock();
    }

    // Input series.
    std::optional<plant::SeriesSampler> irr_series, tmp_series, load_trace;
    if (cfg.traces.source == "csv") {
        auto irr = load_sampler(cfg.traces.irradiance_csv, "irradiance");
        if (!irr) return irr.error();
        irr_series.emplace(std::move(irr).take());
        if (!cfg.traces.temperature_csv.empty()) {
            auto tmp = load_sampler(cfg.traces.temperature_csv, "temperature");
            if (!tmp) return tmp.error();
            tmp_series.emplace(std::move(tmp).take());
        }
    }
    if (!cfg.traces.load_csv.empty()) {
        auto load = load_sampler(cfg.traces.load_csv, "load");
        if (!load) return load.error();
        load_trace.emplace(std::move(load).take());
    }
    auto weather_at = [&](double t_s) {
        if (irr_series) {
            plant::WeatherSample w;
            w.irr_wm2 = irr_series->at(t_s);
            w.pnl_tmp_c = tmp_series ? tmp_series->at(t_s) : 25.0;
            return w;
        }
        return plant::clearsky_at(cfg.start_tod_s + t_s, cfg.traces.day);
    };
    std::vector<double> base_load;
    if (load_trace) {
        base_load.reserve(steps);
        for (std::uint64_t k = 0; k < steps; ++k) base_load.push_back(load_trace->at(k * dt));
    } else {
        base_load = plant::load_series(0, steps, dt, cfg.traces.load);
    }

    // Model, plant and the protocol stack around them.
    auto model_r = model::build_home_model(cfg.plant, clock);
    if (!model_r) return RunError{std::string("model build failed: ") +
                                  model::to_string(model_r.error())};
    auto model = model_r.value();
    plant::Plant plant(cfg.plant, model);

    goose::InProcBus bus;
    std::shared_ptr<goose::Transport> pub_transport, sub_transport;
    if (inproc) {
        pub_transport = bus.endpoint();
        sub_transport = bus.endpoint();
    } else {
        goose::UdpMulticastConfig ucfg;
        ucfg.group = cfg.transports.goose_group;
        ucfg.port = static_cast<std::uint16_t>(cfg.transports.goose_port);
        auto udp = goose::UdpMulticastTransport::open(ucfg);
        if (!udp) return RunError{std::string("goose transport: ") +
                                  goose::to_string(udp.error())};
        pub_transport = udp.value();
        sub_transport = udp.value();
    }
    goose::PublisherConfig pub_cfg;
    pub_cfg.go_id = std::string(kProsumerId) + "-meas";
    auto publisher = std::make_shared<goose::Publisher>(pub_transport, pub_cfg);
    goose::Subscriber subscriber(sub_transport, clock);
    subscriber.subscribe(pub_cfg.go_id, [](const goose::GooseFrame&) {});
    goose::GooseMirror mirror(model, model::kDsMeas, publisher, clock);
    if (auto r = mirror.attach(); !r) {
        return RunError{std::string("mirror attach failed: ") + model::to_string(r.error())};
    }
    std::optional<goose::AutoRetransmitter> retransmitter;
    if (!inproc) retransmitter.emplace(*publisher);

    broker::ContextStore store(clock);
    bridge::DirectLink link(*model);
    bridge::I61850Agent agent(store, link, bridge::I61850Config{{model::kDsBridge}, "Prosumer"});
    if (auto r = agent.start(); !r) {
        return RunError{std::string("bridge start failed: ") + bridge::to_string(r.error())};
    }

    std::optional<acsi::AcsiServer> acsi_server;
    std::optional<broker::BrokerService> broker_service;
    if (!inproc) {
        acsi::AcsiServerConfig scfg;
        scfg.port = static_cast<std::uint16_t>(cfg.transports.acsi_port);
        acsi_server.emplace(model, scfg, clock);
        if (auto r = acsi_server->start(); !r) {
            return RunError{"acsi server failed to bind port " +
                            std::to_string(cfg.transports.acsi_port)};
        }
        broker::BrokerConfig bcfg;
        bcfg.port = cfg.transports.broker_port;
        broker_service.emplace(store, bcfg);
        if (auto r = broker_service->start(); !r) {
            return RunError{"broker service: " + r.error()};
        }
    }

    // Controllers.
    hems::LoadController load_ctl(cfg.prefs, cfg.plant.switch_loads.empty()
                                                 ? 0.0
                                                 : cfg.plant.switch_loads[0].watts);
    hems::MarketTracker tracker(cfg.prefs, cfg.plant,
                                cfg.plant.switch_loads.empty() ? 0.0
                                                               : cfg.plant.switch_loads[0].watts);

    // Aggregator state (market runs).
    agg::Chain chain;
    agg::RecProfile rec;
    if (cfg.scenario == Scenario::Market) {
        if (!cfg.aggregator.rec_csv.empty()) {
            auto r = agg::rec_profile_from_csv(cfg.aggregator.rec_csv, cfg.aggregator.interval_s);
            if (!r) {
                return RunError{"rec profile " + cfg.aggregator.rec_csv + ": line " +
                                std::to_string(r.error().line) + ": " + r.error().message};
            }
            rec = std::move(r).take();
        } else {
            agg::RecSynthParams sp;
            sp.n_houses = cfg.aggregator.n_houses;
            sp.pv_fraction = cfg.aggregator.pv_fraction;
            sp.base_load_per_house_w = cfg.aggregator.base_load_per_house_w;
            sp.pv_peak_per_house_w = cfg.aggregator.pv_peak_per_house_w;
            sp.day = cfg.traces.day;
            rec = agg::rec_profile_synth(sp, cfg.start_tod_s + cfg.duration_s,
                                         cfg.aggregator.interval_s);
        }
    }

    // Warm start so runs begin in steady state instead of a start-up ramp.
    {
        plant::WeatherSample w0 = weather_at(0);
        double mppt0 = plant::pv_mppt_power(w0.irr_wm2, w0.pnl_tmp_c, cfg.plant);
        double target0 = mppt0;
        if (cfg.scenario == Scenario::Inverter) {
            target0 = hems::curtailment_controller(base_load[0], 0.0, cfg.p_ref_w, mppt0);
        } else if (cfg.scenario == Scenario::Market) {
            target0 = 0;
        }
        double pv0 = std::clamp(q32(target0), 0.0, std::min(mppt0, cfg.plant.pv_peak_w));
        plant.warm_start(pv0, cfg.plant.soc_init);
    }

    std::ofstream csv(out_dir + "/run.csv", std::ios::trunc);
    if (!csv) return RunError{"cannot write " + out_dir + "/run.csv"};
    csv << "t_s,p_load_w,p_pv_w,p_pv_mppt_w,p_batt_w,p_grid_w,p_ref_w,soc_pct,switch_state\n";

    RunMetrics metrics;
    metrics.soc_start = cfg.plant.soc_init;
    const double kwh = dt / 3.6e6;
    double p_ref = cfg.p_ref_w;
    std::optional<IntervalAccum> interval;
    auto finalize_interval = [&](std::uint64_t now_us) -> Result<void, RunError> {
        if (!interval) return {};
        IntervalMetrics im;
        im.idx = interval->idx;
        im.p_ref_w = interval->p_ref_w;
        im.mean_grid_w =
            interval->samples ? interval->grid_sum_w / static_cast<double>(interval->samples) : 0;
        im.error_kwh = interval->err_kwh;
        metrics.intervals.push_back(im);
        agg::MeasurementReport mr;
        mr.prosumer_id = kProsumerId;
        mr.interval_idx = interval->idx;
        mr.energy_error_kwh = im.error_kwh;
        mr.mean_p_grid_w = im.mean_grid_w;
        if (auto r = chain.append({agg::Tx{mr}}, now_us); !r) {
            return RunError{std::string("ledger append failed: ") + agg::to_string(r.error())};
        }
        interval.reset();
        return {};
    };

    const auto wall_start = std::chrono::steady_clock::now();
    for (std::uint64_t k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) * dt;
        const double tod = cfg.start_tod_s + t;
        if (inproc) sim_clock->set_us(kSimEpochUs + static_cast<std::uint64_t>(t * 1e6));
        const std::uint64_t now_us = clock->now_us();

        plant::WeatherSample w = weather_at(t);
        const double mppt = plant::pv_mppt_power(w.irr_wm2, w.pnl_tmp_c, cfg.plant);
        const double base = base_load[k];
        const double soc = plant.state().soc;

        // Market runs settle the aggregator exchange at interval boundaries.
        if (cfg.scenario == Scenario::Market) {
            auto idx = static_cast<std::uint32_t>(tod / cfg.aggregator.interval_s);
            if (!interval || interval->idx != idx) {
                if (auto r = finalize_interval(now_us); !r) return r.error();
                agg::CapacityReport cr;
                cr.prosumer_id = kProsumerId;
                cr.interval_idx = idx;
                cr.p_min_w = cfg.aggregator.p_min_w;
                cr.p_max_w = cfg.aggregator.p_max_w;
                if (auto r = chain.append({agg::Tx{cr}}, now_us); !r) {
                    return RunError{std::string("ledger append failed: ") +
                                    agg::to_string(r.error())};
                }
                double p_rec = idx < rec.p_rec_w.size() ? rec.p_rec_w[idx] : 0.0;
                auto caps = agg::collect_capacities(chain, idx);
                auto alloc = agg::allocate_setpoints(p_rec, caps);
                if (!alloc) return RunError{"setpoint allocation failed"};
                if (auto r = agg::dispatch(chain, alloc.value(), idx, now_us); !r) {
                    return RunError{std::string("dispatch failed: ") +
                                    agg::to_string(r.error())};
                }
                p_ref = agg::find_dispatch(chain, kProsumerId, idx).value_or(0.0);
                interval = IntervalAccum{idx, p_ref, 0, 0, 0};
            }
        }

        // Decide commands for this step.
        double inv_target = mppt;
        double batt_cmd = 0;
        bool switch_on = false;
        switch (cfg.scenario) {
            case Scenario::Battery: {
                double pv_pred = plant::inverter_step(
                    std::clamp(q32(mppt), 0.0, std::min(mppt, cfg.plant.pv_peak_w)),
                    plant.state().p_pv_w, dt, mppt, cfg.plant);
                batt_cmd = hems::battery_controller(pv_pred, base, p_ref);
                break;
            }
            case Scenario::Inverter: {
                inv_target = hems::curtailment_controller(base, 0.0, p_ref, mppt);
                break;
            }
            case Scenario::Load: {
                double pv_pred = plant::inverter_step(
                    std::clamp(q32(mppt), 0.0, std::min(mppt, cfg.plant.pv_peak_w)),
                    plant.state().p_pv_w, dt, mppt, cfg.plant);
                switch_on = load_ctl.step(pv_pred - base - p_ref, tod, dt);
                break;
            }
            case Scenario::Market: {
                hems::MarketDecision d = tracker.step(p_ref, mppt, base, soc, tod, dt);
                inv_target = d.inverter_target_w;
                batt_cmd = d.batt_setpoint_w;
                switch_on = d.switch_on;
                break;
            }
        }

        // Commands go through the model's controller channel; the plant then
        // acts on what the model holds.
        auto wr = model->write(model::paths::kInvTarget,
                               model::DataValue(static_cast<float>(inv_target)),
                               model::WriteChannel::Controller);
        if (wr) {
            wr = model->write(model::paths::kBatSpt, model::DataValue(static_cast<float>(batt_cmd)),
                              model::WriteChannel::Controller);
        }
        if (wr && !cfg.plant.switch_loads.empty()) {
            wr = model->write(model::paths::switch_load_cmd(0), model::DataValue(switch_on),
                              model::WriteChannel::Controller);
        }
        if (!wr) {
            return RunError{std::string("command write failed: ") + model::to_string(wr.error())};
        }

        plant::PlantInputs in;
        auto rd_inv = model->read(model::paths::kInvTarget);
        auto rd_bat = model->read(model::paths::kBatSpt);
        if (!rd_inv || !rd_bat) return RunError{"command readback failed"};
        in.inverter_target_w = static_cast<double>(std::get<float>(rd_inv.value().first));
        in.batt_setpoint_w = static_cast<double>(std::get<float>(rd_bat.value().first));
        in.switch_cmds.resize(cfg.plant.switch_loads.size(), false);
        for (std::size_t i = 0; i < cfg.plant.switch_loads.size(); ++i) {
            auto rd = model->read(model::paths::switch_load_cmd(i));
            if (!rd) return RunError{"switch readback failed"};
            in.switch_cmds[i] = std::get<bool>(rd.value().first);
        }

        const plant::PlantState& st = plant.step(in, w, base, dt);
        double balance = st.p_grid_w - (st.p_pv_w - st.p_load_w - st.p_batt_w);
        if (balance != 0.0) return RunError{"power balance violated at t=" + std::to_string(t)};
        if (st.soc < cfg.plant.soc_min - 1e-12 || st.soc > cfg.plant.soc_max + 1e-12) {
            return RunError{"state of charge left its window at t=" + std::to_string(t)};
        }

        csv << csv_row(t, st, p_ref);
        double err_w = std::abs(st.p_grid_w - p_ref);
        metrics.energy_error_kwh += err_w * kwh;
        metrics.injected_kwh += std::max(st.p_grid_w, 0.0) * kwh;
        metrics.absorbed_kwh += std::max(-st.p_grid_w, 0.0) * kwh;
        if (switch_on) metrics.switch_on_seconds += dt;
        if (cfg.scenario == Scenario::Load) {
            // Shadow accounting: identical PV and load trace, switch held off.
            metrics.energy_error_no_control_kwh += std::abs(st.p_pv_w - base - p_ref) * kwh;
        }
        if (interval) {
            interval->grid_sum_w += st.p_grid_w;
            interval->err_kwh += err_w * kwh;
            interval->samples += 1;
        }

        if (inproc) {
            while (publisher->heartbeat_tick(clock->now_us())) {
            }
        } else {
            std::this_thread::sleep_until(wall_start +
                                          std::chrono::duration_cast<std::chrono::microseconds>(
                                              std::chrono::duration<double>((k + 1) * dt)));
        }
    }

    if (cfg.scenario == Scenario::Market) {
        if (auto r = finalize_interval(clock->now_us()); !r) return r.error();
        if (auto r = chain.save(out_dir + "/chain.log"); !r) {
            return RunError{std::string("ledger save failed: ") + agg::to_string(r.error())};
        }
    }

    metrics.steps = steps;
    metrics.soc_end = plant.state().soc;
    store.flush_notifications();
    metrics.goose_frames_delivered = subscriber.stats().delivered;

    nlohmann::json j;
    j["scenario"] = to_string(cfg.scenario);
    j["duration_s"] = cfg.duration_s;
    j["step_s"] = cfg.step_s;
    j["seed"] = cfg.seed;
    j["energy_error_kwh"] = metrics.energy_error_kwh;
    j["energy_error_no_control_kwh"] = metrics.energy_error_no_control_kwh;
    j["injected_kwh"] = metrics.injected_kwh;
    j["absorbed_kwh"] = metrics.absorbed_kwh;
    j["switch_on_seconds"] = metrics.switch_on_seconds;
    j["soc_start"] = metrics.soc_start;
    j["soc_end"] = metrics.soc_end;
    j["steps"] = metrics.steps;
    j["goose_frames_delivered"] = metrics.goose_frames_delivered;
    j["intervals"] = nlohmann::json::array();
    for (const auto& im : metrics.intervals) {
        j["intervals"].push_back({{"idx", im.idx},
                                  {"p_ref_w", im.p_ref_w},
                                  {"mean_grid_w", im.mean_grid_w},
                                  {"error_kwh", im.error_kwh}});
    }
    std::ofstream mjson(out_dir + "/metrics.json", std::ios::trunc);
    if (!mjson) return RunError{"cannot write " + out_dir + "/metrics.json"};
    mjson << j.dump(2) << "\n";

    agent.stop();
    return metrics;
}

}  // namespace flexgate::harness
