#include "flexgate/acsi/client.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <functional>
#include <memory>
#include <mutex>
#include <thread>
#include <vector>

#include <gtest/gtest.h>

#include "flexgate/acsi/server.hpp"
#include "flexgate/common/bytes.hpp"
#include "flexgate/model/home_model.hpp"

namespace flexgate::acsi {
namespace {

using model::DataValue;
using model::ObjectReference;

struct ServerFixture {
    std::shared_ptr<model::ServerModel> model;
    std::unique_ptr<AcsiServer> server;

    ServerFixture() {
        model = model::build_home_model(plant::PlantConfig{}).value();
        server = std::make_unique<AcsiServer>(model, AcsiServerConfig{"127.0.0.1", 0});
        EXPECT_TRUE(server->start().ok());
    }

    std::unique_ptr<AcsiClient> connect() {
        auto r = AcsiClient::connect("127.0.0.1", server->port());
        EXPECT_TRUE(r.ok());
        return std::move(r).take();
    }
};

bool wait_until(const std::function<bool()>& pred, int timeout_ms = 2000) {
    auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
    while (std::chrono::steady_clock::now() < deadline) {
        if (pred()) return true;
        std::this_thread::sleep_for(std::chrono::milliseconds(1));
    }
    return pred();
}

ObjectReference ref(const char* path) { return *ObjectReference::parse(path); }

TEST(AcsiClient, BrowseMirrorsModelDirectory) {
    ServerFixture fx;
    auto client = fx.connect();

    auto all = client->browse("");
    ASSERT_TRUE(all.ok());
    EXPECT_EQ(all.value(), fx.model->browse(""));

    auto bat = client->browse("BAT1");
    ASSERT_TRUE(bat.ok());
    EXPECT_EQ(bat.value().size(), fx.model->browse("BAT1").size());
    for (const auto& r : bat.value()) EXPECT_EQ(r.device(), "BAT1");

    auto none = client->browse("NOPE");
    ASSERT_TRUE(none.ok());
    EXPECT_TRUE(none.value().empty());
}

TEST(AcsiClient, ReadReturnsValueAndTimestamp) {
    ServerFixture fx;
    ASSERT_TRUE(
        fx.model->write(model::paths::kGridW, 321.5f, model::WriteChannel::Plant).ok());
    auto client = fx.connect();

    auto r = client->read(ref(model::paths::kGridW));
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(std::get<float>(r.value().first), 321.5f);
    EXPECT_GT(r.value().second.us, 0u);

    EXPECT_EQ(client->read(ref("PV1/ZINV1.Nope.mag")).error(), ClientError::NotFound);
}

TEST(AcsiClient, WriteUsesControllerChannel) {
    ServerFixture fx;
    auto client = fx.connect();

    // Setpoints are writable and land in the model.
    ASSERT_TRUE(client->write(ref(model::paths::kBatSpt), DataValue{750.0f}).ok());
    auto back = fx.model->read(model::paths::kBatSpt);
    ASSERT_TRUE(back.ok());
    EXPECT_EQ(std::get<float>(back.value().first), 750.0f);

    // Measurements are the plant's; remote writes are denied.
    EXPECT_EQ(client->write(ref(model::paths::kGridW), DataValue{1.0f}).error(),
              ClientError::AccessDenied);
    EXPECT_EQ(client->write(ref(model::paths::kBatSpt), DataValue{true}).error(),
              ClientError::TypeMismatch);
    EXPECT_EQ(client->write(ref("PV1/ZINV1.Nope.setMag"), DataValue{1.0f}).error(),
              ClientError::NotFound);
}

TEST(AcsiClient, OnChangeReportsFollowDatasetWrites) {
    ServerFixture fx;
    auto client = fx.connect();

    std::mutex mu;
    std::vector<std::vector<DataValue>> reports;
    ASSERT_TRUE(client
                    ->subscribe_report(ReportControl::on_change(model::kDsMeas),
                                       [&](const std::string& dataset,
                                           const std::vector<DataValue>& values) {
                                           std::lock_guard lk(mu);
                                           EXPECT_EQ(dataset, model::kDsMeas);
                                           reports.push_back(values);
                                       })
                    .ok());

    ASSERT_TRUE(fx.model->write(model::paths::kGridW, 11.0f, model::WriteChannel::Plant).ok());
    ASSERT_TRUE(wait_until([&] {
        std::lock_guard lk(mu);
        return reports.size() >= 1;
    }));
    {
        std::lock_guard lk(mu);
        ASSERT_EQ(reports[0].size(), 4u);  // dsMeas: grid, soc, pv, load
        EXPECT_EQ(std::get<float>(reports[0][0]), 11.0f);
    }

    // A write outside the dataset stays silent.
    ASSERT_TRUE(fx.model->write(model::paths::kIrr, 5.0f, model::WriteChannel::Plant).ok());
    ASSERT_TRUE(fx.model->write(model::paths::kSocPct, 52.0f, model::WriteChannel::Plant).ok());
    ASSERT_TRUE(wait_until([&] {
        std::lock_guard lk(mu);
        return reports.size() >= 2;
    }));
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
    std::lock_guard lk(mu);
    EXPECT_EQ(reports.size(), 2u);
    EXPECT_EQ(std::get<float>(reports[1][1]), 52.0f);
}

TEST(AcsiClient, PeriodicReportsArriveAtTheConfiguredRate) {
    ServerFixture fx;
    auto client = fx.connect();

    std::mutex mu;
    int count = 0;
    ASSERT_TRUE(client
                    ->subscribe_report(ReportControl::every_ms(model::kDsMeas, 50),
                                       [&](const std::string&, const std::vector<DataValue>&) {
                                           std::lock_guard lk(mu);
                                           ++count;
                                       })
                    .ok());
    std::this_thread::sleep_for(std::chrono::milliseconds(550));
    std::lock_guard lk(mu);
    EXPECT_GE(count, 4);
    EXPECT_LE(count, 20);
}

TEST(AcsiClient, SubscribeValidation) {
    ServerFixture fx;
    auto client = fx.connect();
    auto noop = [](const std::string&, const std::vector<DataValue>&) {};
    // Periodic floor is 10 ms.
    EXPECT_EQ(client->subscribe_report(ReportControl::every_ms(model::kDsMeas, 5), noop).error(),
              ClientError::ProtocolError);
    EXPECT_EQ(client->subscribe_report(ReportControl::on_change("noSuchSet"), noop).error(),
              ClientError::NotFound);
    EXPECT_TRUE(client->subscribe_report(ReportControl::every_ms(model::kDsMeas, 10), noop).ok());
}

TEST(AcsiClient, TransportErrorAfterServerStop) {
    ServerFixture fx;
    auto client = fx.connect();
    ASSERT_TRUE(client->read(ref(model::paths::kGridW)).ok());
    fx.server->stop();
    auto r = client->read(ref(model::paths::kGridW));
    ASSERT_FALSE(r.ok());
    EXPECT_EQ(r.error(), ClientError::Transport);
}

TEST(AcsiClient, ConcurrentClientsStayConsistent) {
    ServerFixture fx;
    constexpr int kOps = 60;
    std::vector<std::thread> threads;
    std::atomic<int> failures{0};
    for (int c = 0; c < 3; ++c) {
        threads.emplace_back([&fx, &failures, c] {
            auto cl = AcsiClient::connect("127.0.0.1", fx.server->port());
            if (!cl.ok()) {
                ++failures;
                return;
            }
            auto client = std::move(cl).take();
            for (int i = 0; i < kOps; ++i) {
                float v = static_cast<float>(c * 1000 + i);
                if (!client->write(ref(model::paths::kBatSpt), DataValue{v}).ok()) ++failures;
                auto r = client->read(ref(model::paths::kBatSpt));
                if (!r.ok()) ++failures;
            }
        });
    }
    for (auto& t : threads) t.join();
    EXPECT_EQ(failures.load(), 0);
}

// Raw-socket client for wire-level cases the typed client cannot produce.
struct RawClient {
    int fd = -1;

    explicit RawClient(std::uint16_t port) {
        fd = ::socket(AF_INET, SOCK_STREAM, 0);
        ASSERT_TRUE(fd >= 0);
        sockaddr_in addr{};
        addr.sin_family = AF_INET;
        addr.sin_port = htons(port);
        inet_pton(AF_INET, "127.0.0.1", &addr.sin_addr);
        ASSERT_EQ(::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)), 0);
    }
    ~RawClient() {
        if (fd >= 0) ::close(fd);
    }

    void send_bytes(const std::vector<std::uint8_t>& b) {
        ASSERT_EQ(::send(fd, b.data(), b.size(), 0), static_cast<ssize_t>(b.size()));
    }

    // Receives exactly n bytes; empty result on EOF.
    std::vector<std::uint8_t> recv_bytes(std::size_t n) {
        std::vector<std::uint8_t> out(n);
        std::size_t got = 0;
        while (got < n) {
            ssize_t r = ::recv(fd, out.data() + got, n - got, 0);
            if (r <= 0) return {};
            got += static_cast<std::size_t>(r);
        }
        return out;
    }
};

std::vector<std::uint8_t> envelope_bytes(std::uint8_t opcode,
                                         const std::vector<std::uint8_t>& payload) {
    ByteWriter w;
    w.u32(static_cast<std::uint32_t>(1 + payload.size()));
    w.u8(opcode);
    w.bytes(payload);
    return w.take();
}

TEST(AcsiWire, MalformedEnvelopeGetsErrorThenClose) {
    ServerFixture fx;
    RawClient raw(fx.server->port());

    // A zero-length envelope cannot be resynchronized.
    raw.send_bytes({0x00, 0x00, 0x00, 0x00});
    auto head = raw.recv_bytes(4);
    ASSERT_EQ(head.size(), 4u);
    EXPECT_EQ((std::vector<std::uint8_t>{0x00, 0x00, 0x00, 0x02}), head);
    auto body = raw.recv_bytes(2);
    ASSERT_EQ(body.size(), 2u);
    EXPECT_EQ(body[0], kOpProtocolError);
    EXPECT_EQ(body[1], static_cast<std::uint8_t>(StatusCode::ProtocolError));
    // The server closes after replying.
    EXPECT_TRUE(raw.recv_bytes(1).empty());
}

TEST(AcsiWire, UnknownOpcodeKeepsConnectionAlive) {
    ServerFixture fx;
    RawClient raw(fx.server->port());

    raw.send_bytes(envelope_bytes(0x55, {}));
    auto head = raw.recv_bytes(4);
    ASSERT_EQ(head.size(), 4u);
    auto body = raw.recv_bytes(2);
    ASSERT_EQ(body.size(), 2u);
    EXPECT_EQ(body[0], 0x55 | kOpResponseFlag);
    EXPECT_EQ(body[1], static_cast<std::uint8_t>(StatusCode::ProtocolError));

    // The same connection still answers a well-formed request.
    ByteWriter w;
    w.text16("GRID1");
    raw.send_bytes(envelope_bytes(kOpGetDirectory, w.take()));
    head = raw.recv_bytes(4);
    ASSERT_EQ(head.size(), 4u);
    std::uint32_t len = 0;
    for (auto b : head) len = len << 8 | b;
    auto body2 = raw.recv_bytes(len);
    ASSERT_EQ(body2.size(), len);
    EXPECT_EQ(body2[0], kOpGetDirectory | kOpResponseFlag);
    EXPECT_EQ(body2[1], static_cast<std::uint8_t>(StatusCode::Ok));
}

TEST(AcsiWire, TruncatedValuePayloadIsAProtocolError) {
    ServerFixture fx;
    RawClient raw(fx.server->port());

    // Write request whose value TLV is cut short: recoverable, status-level.
    ByteWriter w;
    w.text16(model::paths::kBatSpt);
    w.u8(3);  // Float32 tag with no payload
    raw.send_bytes(envelope_bytes(kOpWrite, w.take()));
    auto head = raw.recv_bytes(4);
    ASSERT_EQ(head.size(), 4u);
    auto body = raw.recv_bytes(2);
    ASSERT_EQ(body.size(), 2u);
    EXPECT_EQ(body[0], kOpWrite | kOpResponseFlag);
    EXPECT_EQ(body[1], static_cast<std::uint8_t>(StatusCode::ProtocolError));
}

}  // namespace
}  // namespace flexgate::acsi
