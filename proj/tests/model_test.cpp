#include "flexgate/model/server_model.hpp"

#include <memory>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "flexgate/common/clock.hpp"
#include "flexgate/model/home_model.hpp"
#include "flexgate/model/object_reference.hpp"
#include "flexgate/plant/config.hpp"

namespace flexgate::model {
namespace {

ObjectReference ref(const char* path) {
    auto r = ObjectReference::parse(path);
    EXPECT_TRUE(r.has_value()) << path;
    return *r;
}

// A small model with one attribute per functional constraint.
std::shared_ptr<ServerModel> make_model(std::shared_ptr<Clock> clock = wall_clock()) {
    auto m = std::make_shared<ServerModel>("dev1", std::move(clock));
    EXPECT_TRUE(m->add_device("LD1").ok());
    EXPECT_TRUE(m->add_node("LD1", "MMXU1", "MMXU").ok());
    EXPECT_TRUE(m->add_attribute(ref("LD1/MMXU1.TotW.mag"), ValueKind::Float32,
                                 FuncConstraint::MX, 0.0f)
                    .ok());
    EXPECT_TRUE(m->add_attribute(ref("LD1/MMXU1.Beh.stVal"), ValueKind::Bool, FuncConstraint::ST,
                                 true)
                    .ok());
    EXPECT_TRUE(m->add_attribute(ref("LD1/MMXU1.Pos.ctlVal"), ValueKind::Bool, FuncConstraint::CO,
                                 false)
                    .ok());
    EXPECT_TRUE(m->add_attribute(ref("LD1/MMXU1.WSpt.setMag"), ValueKind::Float32,
                                 FuncConstraint::SP, 0.0f)
                    .ok());
    return m;
}

TEST(ObjectReference, ParsesFourSegments) {
    auto r = ObjectReference::parse("PV1/ZINV1.OutWSet.setMag");
    ASSERT_TRUE(r.has_value());
    EXPECT_EQ(r->device(), "PV1");
    EXPECT_EQ(r->node(), "ZINV1");
    EXPECT_EQ(r->object(), "OutWSet");
    EXPECT_EQ(r->attribute(), "setMag");
    EXPECT_EQ(r->str(), "PV1/ZINV1.OutWSet.setMag");
}

TEST(ObjectReference, RejectsMalformedPaths) {
    EXPECT_FALSE(ObjectReference::parse("").has_value());
    EXPECT_FALSE(ObjectReference::parse("LD1").has_value());
    EXPECT_FALSE(ObjectReference::parse("LD1/LN1").has_value());
    EXPECT_FALSE(ObjectReference::parse("LD1/LN1.DO1").has_value());
    EXPECT_FALSE(ObjectReference::parse("LD1/LN1.DO1.DA1.extra").has_value());
    EXPECT_FALSE(ObjectReference::parse("/LN1.DO1.DA1").has_value());
    EXPECT_FALSE(ObjectReference::parse("LD1/.DO1.DA1").has_value());
    EXPECT_FALSE(ObjectReference::parse("LD1/LN1..DA1").has_value());
    EXPECT_FALSE(ObjectReference::parse("LD1/LN1.DO1.").has_value());
    EXPECT_FALSE(ObjectReference::parse("LD1/LN2/LN3.DO1.DA1").has_value());
}

TEST(ServerModel, DuplicateNamesRejected) {
    auto m = make_model();
    EXPECT_EQ(m->add_device("LD1").error(), ModelError::DuplicateName);
    EXPECT_EQ(m->add_node("LD1", "MMXU1", "MMXU").error(), ModelError::DuplicateName);
    EXPECT_EQ(m->add_attribute(ref("LD1/MMXU1.TotW.mag"), ValueKind::Float32, FuncConstraint::MX,
                               0.0f)
                  .error(),
              ModelError::DuplicateName);
    EXPECT_EQ(m->add_node("LDx", "MMXU1", "MMXU").error(), ModelError::NotFound);
    EXPECT_EQ(m->add_attribute(ref("LD1/LNx.TotW.mag"), ValueKind::Float32, FuncConstraint::MX,
                               0.0f)
                  .error(),
              ModelError::NotFound);
}

TEST(ServerModel, ReadWriteRoundTrip) {
    auto clock = std::make_shared<ManualClock>(1000);
    auto m = make_model(clock);
    auto w = m->write("LD1/MMXU1.TotW.mag", 42.5f, WriteChannel::Plant);
    ASSERT_TRUE(w.ok());
    auto r = m->read("LD1/MMXU1.TotW.mag");
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(std::get<float>(r.value().first), 42.5f);
    EXPECT_EQ(r.value().second.us, 1000u);
}

TEST(ServerModel, WriteChannelEnforcement) {
    auto m = make_model();
    // MX/ST belong to the plant, CO/SP/CF to controllers.
    EXPECT_EQ(m->write("LD1/MMXU1.TotW.mag", 1.0f, WriteChannel::Controller).error(),
              ModelError::AccessDenied);
    EXPECT_EQ(m->write("LD1/MMXU1.Beh.stVal", false, WriteChannel::Controller).error(),
              ModelError::AccessDenied);
    EXPECT_EQ(m->write("LD1/MMXU1.Pos.ctlVal", true, WriteChannel::Plant).error(),
              ModelError::AccessDenied);
    EXPECT_EQ(m->write("LD1/MMXU1.WSpt.setMag", 1.0f, WriteChannel::Plant).error(),
              ModelError::AccessDenied);
    EXPECT_TRUE(m->write("LD1/MMXU1.Pos.ctlVal", true, WriteChannel::Controller).ok());
    EXPECT_TRUE(m->write("LD1/MMXU1.WSpt.setMag", 1.0f, WriteChannel::Controller).ok());
}

TEST(ServerModel, TypeMismatchOnWrite) {
    auto m = make_model();
    EXPECT_EQ(m->write("LD1/MMXU1.TotW.mag", true, WriteChannel::Plant).error(),
              ModelError::TypeMismatch);
    EXPECT_EQ(m->write("LD1/MMXU1.TotW.mag", 1.0, WriteChannel::Plant).error(),
              ModelError::TypeMismatch);
}

TEST(ServerModel, UnknownPathsReportNotFound) {
    auto m = make_model();
    EXPECT_EQ(m->read("LD1/MMXU1.TotW.nope").error(), ModelError::NotFound);
    EXPECT_EQ(m->read("LDx/MMXU1.TotW.mag").error(), ModelError::NotFound);
    EXPECT_EQ(m->write("LD1/MMXU1.Missing.mag", 1.0f, WriteChannel::Plant).error(),
              ModelError::NotFound);
    EXPECT_EQ(m->read("not a path").error(), ModelError::BadReference);
}

TEST(ServerModel, BrowseIsSortedAndPrefixed) {
    auto m = make_model();
    auto all = m->browse();
    ASSERT_EQ(all.size(), 4u);
    for (std::size_t i = 1; i < all.size(); ++i) {
        EXPECT_LT(all[i - 1].str(), all[i].str());
    }
    EXPECT_EQ(m->browse("LD1/MMXU1.TotW").size(), 1u);
    EXPECT_EQ(m->browse("LDx").size(), 0u);
}

TEST(ServerModel, DatasetDefinitionAndSnapshot) {
    auto m = make_model();
    EXPECT_EQ(m->define_dataset("empty", {}).error(), ModelError::EmptyDataSet);
    EXPECT_EQ(m->define_dataset("bad", {ref("LD1/MMXU1.Missing.mag")}).error(),
              ModelError::NotFound);

    std::vector<ObjectReference> members{ref("LD1/MMXU1.TotW.mag"), ref("LD1/MMXU1.Beh.stVal")};
    ASSERT_TRUE(m->define_dataset("ds1", members).ok());
    EXPECT_EQ(m->define_dataset("ds1", members).error(), ModelError::DuplicateName);

    ASSERT_TRUE(m->write("LD1/MMXU1.TotW.mag", 7.0f, WriteChannel::Plant).ok());
    auto snap = m->snapshot_dataset("ds1");
    ASSERT_TRUE(snap.ok());
    ASSERT_EQ(snap.value().size(), 2u);
    EXPECT_EQ(std::get<float>(snap.value()[0]), 7.0f);
    EXPECT_EQ(std::get<bool>(snap.value()[1]), true);
    EXPECT_EQ(m->snapshot_dataset("nope").error(), ModelError::NotFound);
}

TEST(ServerModel, WriteObserversRunInCommitOrder) {
    auto m = make_model();
    std::vector<std::string> seen;
    int id = m->add_write_observer(
        [&](const ObjectReference& r, const DataValue& v, TimestampUs) {
            seen.push_back(r.str() + "=" + std::to_string(std::get<float>(v)));
        });
    ASSERT_TRUE(m->write("LD1/MMXU1.TotW.mag", 1.0f, WriteChannel::Plant).ok());
    ASSERT_TRUE(m->write("LD1/MMXU1.TotW.mag", 2.0f, WriteChannel::Plant).ok());
    ASSERT_EQ(seen.size(), 2u);
    EXPECT_NE(seen[0].find("=1.0"), std::string::npos);
    EXPECT_NE(seen[1].find("=2.0"), std::string::npos);

    // Rejected writes never notify.
    m->remove_write_observer(id);
    ASSERT_TRUE(m->write("LD1/MMXU1.TotW.mag", 3.0f, WriteChannel::Plant).ok());
    EXPECT_EQ(seen.size(), 2u);
}

TEST(HomeModel, BuildsFullProsumerModel) {
    plant::PlantConfig cfg;
    auto r = build_home_model(cfg);
    ASSERT_TRUE(r.ok());
    auto m = r.value();

    auto inv = m->resolve(paths::kInvTarget);
    ASSERT_TRUE(inv.ok());
    EXPECT_EQ(inv.value().kind, ValueKind::Float32);
    EXPECT_EQ(inv.value().fc, FuncConstraint::SP);

    auto sw = m->resolve(paths::switch_load_cmd(0));
    ASSERT_TRUE(sw.ok());
    EXPECT_EQ(sw.value().kind, ValueKind::Bool);
    EXPECT_EQ(sw.value().fc, FuncConstraint::CO);

    // Configuration attributes carry the plant limits.
    auto max_w = m->read(paths::kInvMaxW);
    ASSERT_TRUE(max_w.ok());
    EXPECT_EQ(std::get<float>(max_w.value().first), 4000.0f);

    auto meas = m->dataset(kDsMeas);
    ASSERT_TRUE(meas.ok());
    EXPECT_EQ(meas.value().members.size(), 4u);
    auto cmd = m->dataset(kDsCmd);
    ASSERT_TRUE(cmd.ok());
    EXPECT_EQ(cmd.value().members.size(), 3u);
    auto bridge = m->dataset(kDsBridge);
    ASSERT_TRUE(bridge.ok());
    EXPECT_EQ(bridge.value().members.size(), 9u);
}

TEST(HomeModel, ScalesWithSwitchableLoads) {
    plant::PlantConfig cfg;
    cfg.switch_loads = {{"plug1", 700.0}, {"boiler", 1200.0}};
    auto r = build_home_model(cfg);
    ASSERT_TRUE(r.ok());
    EXPECT_TRUE(r.value()->resolve(paths::switch_load_cmd(1)).ok());
    EXPECT_EQ(r.value()->dataset(kDsCmd).value().members.size(), 4u);
}

TEST(HomeModel, RejectsDuplicateLoadNames) {
    plant::PlantConfig cfg;
    cfg.switch_loads = {{"plug1", 700.0}, {"plug1", 500.0}};
    EXPECT_EQ(build_home_model(cfg).error(), ModelError::DuplicateName);
}

}  // namespace
}  // namespace flexgate::model
