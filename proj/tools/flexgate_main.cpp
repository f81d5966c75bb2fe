#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "flexgate/harness/cli_utils.hpp"
#include "flexgate/harness/config.hpp"
#include "flexgate/harness/runner.hpp"

namespace {

int cmd_run(const std::string& config_path, const std::string& out_dir) {
    auto cfg = flexgate::harness::load_run_config(config_path);
    if (!cfg) {
        if (cfg.error().line > 0) {
            std::cerr << config_path << ":" << cfg.error().line << ": " << cfg.error().message
                      << "\n";
        } else {
            std::cerr << config_path << ": " << cfg.error().message << "\n";
        }
        return 2;
    }
    auto metrics = flexgate::harness::run_scenario(cfg.value(), out_dir);
    if (!metrics) {
        std::cerr << "run failed: " << metrics.error().message << "\n";
        return 3;
    }
    const auto& m = metrics.value();
    std::printf("scenario           %s\n", flexgate::harness::to_string(cfg.value().scenario));
    std::printf("steps              %llu\n", static_cast<unsigned long long>(m.steps));
    std::printf("energy error       %.6f kWh\n", m.energy_error_kwh);
    std::printf("injected           %.6f kWh\n", m.injected_kwh);
    std::printf("absorbed           %.6f kWh\n", m.absorbed_kwh);
    std::printf("switch on          %.0f s\n", m.switch_on_seconds);
    std::printf("soc                %.4f -> %.4f\n", m.soc_start, m.soc_end);
    std::printf("outputs            %s/run.csv, %s/metrics.json\n", out_dir.c_str(),
                out_dir.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"flexgate: prosumer flexibility gateway simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out";
    CLI::App* run = app.add_subcommand("run", "run a scenario from a config file");
    run->add_option("--config", config_path, "TOML run configuration")->required();
    run->add_option("--out", out_dir, "output directory (created if missing)");

    std::string ledger_path;
    CLI::App* verify = app.add_subcommand("verify-ledger", "check a chain file block by block");
    verify->add_option("file", ledger_path, "chain file to verify")->required();

    std::string group = "239.61.8.50";
    int port = 10285;
    double duration_s = 5.0;
    CLI::App* dump = app.add_subcommand("goose-dump", "print decoded frames from the bus");
    dump->add_option("--group", group, "multicast group address");
    dump->add_option("--port", port, "UDP port");
    dump->add_option("--duration", duration_s, "listen time in seconds");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return cmd_run(config_path, out_dir);
    if (verify->parsed()) return flexgate::harness::verify_ledger_cli(ledger_path, std::cout);
    if (dump->parsed()) return flexgate::harness::goose_dump_cli(group, port, duration_s, std::cout);
    return 1;
}
