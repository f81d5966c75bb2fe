#include "flexgate/harness/cli_utils.hpp"

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <mutex>
#include <thread>

#include "flexgate/agg/ledger.hpp"
#include "flexgate/goose/frame.hpp"
#include "flexgate/goose/transport.hpp"

namespace flexgate::harness {

int verify_ledger_cli(const std::string& path, std::ostream& out) {
    if (!std::filesystem::exists(path)) {
        out << "error: cannot open " << path << "\n";
        return 2;
    }
    agg::VerifyReport report = agg::Chain::verify_file(path);
    std::uint64_t shown = report.ok ? report.block_count : report.first_bad_index;
    for (std::uint64_t i = 0; i < shown; ++i) {
        out << "block " << i << ": ok\n";
    }
    if (report.ok) {
        out << path << ": " << report.block_count << " block(s), chain intact\n";
        return 0;
    }
    out << "block " << report.first_bad_index << ": CORRUPT\n";
    out << path << ": verification failed at block " << report.first_bad_index << "\n";
    return 1;
}

int goose_dump_cli(const std::string& group, int port, double duration_s, std::ostream& out) {
    goose::UdpMulticastConfig cfg;
    cfg.group = group;
    cfg.port = static_cast<std::uint16_t>(port);
    auto transport = goose::UdpMulticastTransport::open(cfg);
    if (!transport) {
        out << "error: cannot open multicast " << group << ":" << port << " ("
            << goose::to_string(transport.error()) << ")\n";
        return 2;
    }
    std::mutex mu;
    std::atomic<std::uint64_t> decoded{0}, failed{0};
    transport.value()->set_receive_callback([&](std::span<const std::uint8_t> bytes) {
        auto frame = goose::decode_frame(bytes);
        if (!frame) {
            failed.fetch_add(1);
            return;
        }
        const goose::GooseFrame& f = frame.value();
        std::lock_guard lk(mu);
        out << "t=" << f.timestamp_us << "us goId=" << f.go_id << " st=" << f.st_num
            << " sq=" << f.sq_num << " ttl=" << f.ttl_ms << "ms entries=" << f.entries.size()
            << "\n";
        decoded.fetch_add(1);
    });
    std::this_thread::sleep_for(std::chrono::duration<double>(duration_s));
    transport.value()->set_receive_callback(nullptr);
    out << "decoded " << decoded.load() << " frame(s), " << failed.load()
        << " decode error(s)\n";
    return 0;
}

}  // namespace flexgate::harness
