#include "flexgate/goose/frame.hpp"

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "flexgate/common/clock.hpp"
#include "flexgate/goose/mirror.hpp"
#include "flexgate/goose/publisher.hpp"
#include "flexgate/goose/schedule.hpp"
#include "flexgate/goose/subscriber.hpp"
#include "flexgate/goose/transport.hpp"
#include "flexgate/model/home_model.hpp"

namespace flexgate::goose {
namespace {

using model::DataValue;
using model::TimestampUs;

std::vector<std::uint8_t> encode_ok(const GooseFrame& f) {
    auto r = encode_frame(f);
    EXPECT_TRUE(r.ok());
    return std::move(r).take();
}

GooseFrame decode_ok(std::span<const std::uint8_t> bytes) {
    auto r = decode_frame(bytes);
    EXPECT_TRUE(r.ok()) << (r.ok() ? "" : to_string(r.error()));
    return std::move(r).take();
}

DataValue random_value(std::mt19937_64& rng) {
    switch (rng() % 6) {
        case 0: return DataValue{rng() % 2 == 0};
        case 1: return DataValue{static_cast<std::int32_t>(rng())};
        case 2: return DataValue{std::uniform_real_distribution<float>(-1e6f, 1e6f)(rng)};
        case 3: return DataValue{std::uniform_real_distribution<double>(-1e9, 1e9)(rng)};
        case 4: {
            std::string s(rng() % 20, 'x');
            for (auto& c : s) c = static_cast<char>('a' + rng() % 26);
            return DataValue{std::move(s)};
        }
        default: return DataValue{TimestampUs{rng()}};
    }
}

GooseFrame random_frame(std::mt19937_64& rng) {
    GooseFrame f;
    f.app_id = static_cast<std::uint16_t>(rng());
    f.go_id = std::string(rng() % 32, 'g');
    f.st_num = static_cast<std::uint32_t>(rng());
    f.sq_num = static_cast<std::uint32_t>(rng());
    f.timestamp_us = rng();
    f.ttl_ms = static_cast<std::uint32_t>(rng());
    std::size_t n = rng() % 8;
    for (std::size_t i = 0; i < n; ++i) f.entries.push_back(random_value(rng));
    return f;
}

// Hand-encoded reference frame: appId 1, goId "inv1", stNum 1, sqNum 0,
// timestamp 0, TTL 8 ms, one boolean entry set true.
const std::vector<std::uint8_t> kGoldenBytes{
    0x47, 0x53, 0x45, 0x31,              // magic "GSE1"
    0x01,                                // version
    0x00, 0x01,                          // appId
    0x04, 0x69, 0x6E, 0x76, 0x31,        // goId "inv1"
    0x00, 0x00, 0x00, 0x01,              // stNum
    0x00, 0x00, 0x00, 0x00,              // sqNum
    0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00,  // timestampUs
    0x00, 0x00, 0x00, 0x08,              // ttlMs
    0x00, 0x01,                          // numEntries
    0x01, 0x01,                          // Bool true
};

GooseFrame golden_frame() {
    GooseFrame f;
    f.app_id = 1;
    f.go_id = "inv1";
    f.st_num = 1;
    f.sq_num = 0;
    f.timestamp_us = 0;
    f.ttl_ms = 8;
    f.entries = {DataValue{true}};
    return f;
}

TEST(GooseCodec, GoldenFrameBytes) {
    EXPECT_EQ(encode_ok(golden_frame()), kGoldenBytes);
    EXPECT_EQ(decode_ok(kGoldenBytes), golden_frame());
}

TEST(GooseCodec, RoundTripRandomFrames) {
    std::mt19937_64 rng(42);
    for (int i = 0; i < 500; ++i) {
        GooseFrame f = random_frame(rng);
        EXPECT_EQ(decode_ok(encode_ok(f)), f) << "iteration " << i;
    }
}

TEST(GooseCodec, ValueTagsMatchKinds) {
    // The TLV tag is the ValueKind discriminant.
    const std::pair<DataValue, std::uint8_t> cases[] = {
        {DataValue{true}, 1},          {DataValue{std::int32_t{-5}}, 2},
        {DataValue{1.5f}, 3},          {DataValue{2.5}, 4},
        {DataValue{std::string{"t"}}, 5}, {DataValue{TimestampUs{9}}, 6},
    };
    for (const auto& [v, tag] : cases) {
        ByteWriter w;
        ASSERT_TRUE(encode_value(w, v).ok());
        EXPECT_EQ(w.data()[0], tag);
        ByteReader r(w.data());
        auto back = decode_value(r);
        ASSERT_TRUE(back.ok());
        EXPECT_EQ(back.value(), v);
    }
}

TEST(GooseCodec, RejectsBadMagic) {
    auto bytes = kGoldenBytes;
    bytes[0] = 0x46;
    EXPECT_EQ(decode_frame(bytes).error(), CodecError::BadMagic);
}

TEST(GooseCodec, RejectsBadVersion) {
    auto bytes = kGoldenBytes;
    bytes[4] = 0x02;
    EXPECT_EQ(decode_frame(bytes).error(), CodecError::BadVersion);
}

TEST(GooseCodec, RejectsTruncation) {
    for (std::size_t n = 0; n < kGoldenBytes.size(); ++n) {
        auto prefix = std::vector<std::uint8_t>(kGoldenBytes.begin(), kGoldenBytes.begin() + n);
        auto r = decode_frame(prefix);
        ASSERT_FALSE(r.ok()) << "prefix length " << n;
        EXPECT_EQ(r.error(), CodecError::Truncated) << "prefix length " << n;
    }
}

TEST(GooseCodec, RejectsTrailingBytes) {
    auto bytes = kGoldenBytes;
    bytes.push_back(0x00);
    EXPECT_EQ(decode_frame(bytes).error(), CodecError::TrailingBytes);
}

TEST(GooseCodec, RejectsUnknownTag) {
    auto bytes = kGoldenBytes;
    bytes[34] = 0x07;
    EXPECT_EQ(decode_frame(bytes).error(), CodecError::BadTag);
}

TEST(GooseCodec, RejectsOversizeFields) {
    GooseFrame f = golden_frame();
    f.go_id = std::string(256, 'g');
    EXPECT_EQ(encode_frame(f).error(), CodecError::GoIdTooLong);

    f = golden_frame();
    f.entries = {DataValue{std::string(70000, 'x')}};
    EXPECT_EQ(encode_frame(f).error(), CodecError::TextTooLong);
}

TEST(RetransmitSchedule, StandardLadder) {
    auto s = RetransmitSchedule::standard();
    ASSERT_TRUE(s.valid());
    const std::uint32_t gaps[] = {4, 8, 16, 32, 64, 128, 256, 512, 1000};
    for (std::uint32_t sq = 0; sq < 9; ++sq) {
        EXPECT_EQ(s.gap_ms(sq), gaps[sq]);
        EXPECT_EQ(s.ttl_ms(sq), 2 * gaps[sq]);
    }
    // Past the ladder the heartbeat interval repeats forever.
    EXPECT_EQ(s.gap_ms(9), 1000u);
    EXPECT_EQ(s.gap_ms(1000), 1000u);
}

TEST(RetransmitSchedule, ValidityRules) {
    EXPECT_FALSE(RetransmitSchedule{{}}.valid());
    EXPECT_FALSE(RetransmitSchedule{{0, 4}}.valid());
    EXPECT_FALSE(RetransmitSchedule{{4, 4}}.valid());
    EXPECT_FALSE(RetransmitSchedule{{8, 4}}.valid());
    EXPECT_TRUE(RetransmitSchedule{{10}}.valid());
}

TEST(Publisher, StateChangeBumpsStAndResetsSq) {
    InProcBus bus;
    Publisher pub(bus.endpoint(), PublisherConfig{1, "inv1", RetransmitSchedule::standard()});

    auto f1 = pub.publish_state_change({DataValue{true}}, 1'000'000);
    ASSERT_TRUE(f1.ok());
    EXPECT_EQ(f1.value().st_num, 1u);
    EXPECT_EQ(f1.value().sq_num, 0u);
    EXPECT_EQ(f1.value().ttl_ms, 8u);

    // Retransmissions keep stNum and walk sqNum up the ladder.
    EXPECT_FALSE(pub.heartbeat_tick(1'000'000 + 3'999).has_value());
    auto r1 = pub.heartbeat_tick(1'000'000 + 4'000);
    ASSERT_TRUE(r1.has_value());
    EXPECT_EQ(r1->st_num, 1u);
    EXPECT_EQ(r1->sq_num, 1u);
    EXPECT_EQ(r1->ttl_ms, 16u);

    auto f2 = pub.publish_state_change({DataValue{false}}, 2'000'000);
    ASSERT_TRUE(f2.ok());
    EXPECT_EQ(f2.value().st_num, 2u);
    EXPECT_EQ(f2.value().sq_num, 0u);
}

TEST(Publisher, HeartbeatDeadlinesFollowSchedule) {
    InProcBus bus;
    Publisher pub(bus.endpoint(), PublisherConfig{1, "inv1", RetransmitSchedule::standard()});
    EXPECT_FALSE(pub.next_deadline_us().has_value());

    std::uint64_t t = 10'000'000;
    ASSERT_TRUE(pub.publish_state_change({DataValue{true}}, t).ok());
    const std::uint32_t gaps[] = {4, 8, 16, 32, 64, 128, 256, 512, 1000, 1000, 1000};
    std::uint64_t expected = t;
    for (std::uint32_t i = 0; i < 11; ++i) {
        expected += std::uint64_t{gaps[i]} * 1000;
        ASSERT_EQ(pub.next_deadline_us(), expected);
        auto f = pub.heartbeat_tick(expected);
        ASSERT_TRUE(f.has_value());
        EXPECT_EQ(f->sq_num, i + 1);
    }
}

TEST(Publisher, CatchUpEmitsOnePerCall) {
    InProcBus bus;
    Publisher pub(bus.endpoint(), PublisherConfig{1, "inv1", RetransmitSchedule::standard()});
    ASSERT_TRUE(pub.publish_state_change({DataValue{true}}, 0).ok());

    // One second later the whole 4..512 ms prefix is overdue.
    int fired = 0;
    while (pub.heartbeat_tick(1'000'000).has_value()) ++fired;
    EXPECT_EQ(fired, 8);
    EXPECT_EQ(pub.sq_num(), 8u);
}

TEST(Subscriber, DeliversOncePerStateChange) {
    InProcBus bus;
    auto clock = std::make_shared<ManualClock>(0);
    Publisher pub(bus.endpoint(), PublisherConfig{1, "inv1", RetransmitSchedule::standard()});
    Subscriber sub(bus.endpoint(), clock);

    std::vector<std::uint32_t> seen_st;
    sub.subscribe("inv1", [&](const GooseFrame& f) { seen_st.push_back(f.st_num); });

    ASSERT_TRUE(pub.publish_state_change({DataValue{true}}, 0).ok());
    pub.heartbeat_tick(4'000);
    pub.heartbeat_tick(12'000);
    ASSERT_TRUE(pub.publish_state_change({DataValue{false}}, 20'000).ok());

    EXPECT_EQ(seen_st, (std::vector<std::uint32_t>{1, 2}));
    auto st = sub.stats();
    EXPECT_EQ(st.frames_rx, 4u);
    EXPECT_EQ(st.delivered, 2u);
    EXPECT_EQ(st.decode_errors, 0u);
    EXPECT_EQ(st.suppressed, 0u);
}

TEST(Subscriber, SuppressesDuplicatesAndStaleFrames) {
    InProcBus bus;
    auto tx = bus.endpoint();
    Subscriber sub(bus.endpoint(), std::make_shared<ManualClock>(0));
    int delivered = 0;
    sub.subscribe("inv1", [&](const GooseFrame&) { ++delivered; });

    GooseFrame f = golden_frame();
    f.st_num = 5;
    f.sq_num = 2;
    ASSERT_TRUE(tx->send(encode_ok(f)));
    ASSERT_TRUE(tx->send(encode_ok(f)));  // exact duplicate
    f.sq_num = 1;                         // replayed older retransmission
    ASSERT_TRUE(tx->send(encode_ok(f)));
    f.st_num = 4;                         // stale state
    f.sq_num = 9;
    ASSERT_TRUE(tx->send(encode_ok(f)));

    EXPECT_EQ(delivered, 1);
    EXPECT_EQ(sub.stats().suppressed, 3u);
}

TEST(Subscriber, CountsDecodeErrorsAndIgnoresOtherGoIds) {
    InProcBus bus;
    auto tx = bus.endpoint();
    Subscriber sub(bus.endpoint(), std::make_shared<ManualClock>(0));
    int delivered = 0;
    sub.subscribe("inv1", [&](const GooseFrame&) { ++delivered; });

    const std::vector<std::uint8_t> garbage{0xDE, 0xAD};
    ASSERT_TRUE(tx->send(garbage));
    GooseFrame other = golden_frame();
    other.go_id = "other";
    ASSERT_TRUE(tx->send(encode_ok(other)));

    EXPECT_EQ(delivered, 0);
    EXPECT_EQ(sub.stats().decode_errors, 1u);
    EXPECT_EQ(sub.stats().frames_rx, 2u);
}

TEST(Subscriber, ReportsStaleSources) {
    InProcBus bus;
    auto clock = std::make_shared<ManualClock>(0);
    Publisher pub(bus.endpoint(), PublisherConfig{1, "inv1", RetransmitSchedule::standard()});
    Subscriber sub(bus.endpoint(), clock);
    sub.subscribe("inv1", [](const GooseFrame&) {});

    EXPECT_TRUE(sub.check_stale(1'000'000'000).empty());  // nothing seen yet

    clock->set_us(50'000);
    ASSERT_TRUE(pub.publish_state_change({DataValue{true}}, 50'000).ok());
    // TTL of the first frame is 8 ms.
    EXPECT_TRUE(sub.check_stale(50'000 + 8'000).empty());
    auto stale = sub.check_stale(50'000 + 8'001);
    ASSERT_EQ(stale.size(), 1u);
    EXPECT_EQ(stale[0], "inv1");
}

TEST(GooseMirror, DatasetWritePublishesSnapshot) {
    auto clock = std::make_shared<ManualClock>(7'000'000);
    auto model_r = model::build_home_model(plant::PlantConfig{}, clock);
    ASSERT_TRUE(model_r.ok());
    auto m = model_r.value();

    InProcBus bus;
    auto pub = std::make_shared<Publisher>(
        bus.endpoint(), PublisherConfig{1, "home1-meas", RetransmitSchedule::standard()});
    Subscriber sub(bus.endpoint(), clock);
    std::vector<GooseFrame> frames;
    sub.subscribe("home1-meas", [&](const GooseFrame& f) { frames.push_back(f); });

    GooseMirror mirror(m, model::kDsMeas, pub, clock);
    ASSERT_TRUE(mirror.attach().ok());

    // A write to a dsMeas member publishes the full snapshot.
    ASSERT_TRUE(m->write(model::paths::kGridW, 123.0f, model::WriteChannel::Plant).ok());
    ASSERT_EQ(frames.size(), 1u);
    EXPECT_EQ(frames[0].st_num, 1u);
    EXPECT_EQ(frames[0].timestamp_us, 7'000'000u);
    ASSERT_EQ(frames[0].entries.size(), 4u);
    EXPECT_EQ(std::get<float>(frames[0].entries[0]), 123.0f);  // dsMeas[0] = grid W

    // Writes outside the dataset stay silent.
    ASSERT_TRUE(m->write(model::paths::kIrr, 900.0f, model::WriteChannel::Plant).ok());
    EXPECT_EQ(frames.size(), 1u);

    mirror.detach();
    ASSERT_TRUE(m->write(model::paths::kGridW, 1.0f, model::WriteChannel::Plant).ok());
    EXPECT_EQ(frames.size(), 1u);
}

}  // namespace
}  // namespace flexgate::goose
