#include "flexgate/model/home_model.hpp"

#include <set>

namespace flexgate::model {

namespace paths {

std::string switch_load_tot_w(std::size_t idx) {
    return "LOAD1/MMXU" + std::to_string(idx + 2) + ".TotW.mag";
}

std::string switch_load_cmd(std::size_t idx) {
    return "LOAD1/MMXU" + std::to_string(idx + 2) + ".SwSt.ctlVal";
}

}  // namespace paths

namespace {

using BuildResult = Result<std::shared_ptr<ServerModel>, ModelError>;

Result<void, ModelError> add_attr(ServerModel& m, const char* path, ValueKind kind,
                                  FuncConstraint fc, DataValue initial) {
    auto ref = ObjectReference::parse(path);
    if (!ref) return ModelError::BadReference;
    return m.add_attribute(*ref, kind, fc, std::move(initial));
}

Result<void, ModelError> add_attr(ServerModel& m, const std::string& path, ValueKind kind,
                                  FuncConstraint fc, DataValue initial) {
    return add_attr(m, path.c_str(), kind, fc, std::move(initial));
}

std::vector<ObjectReference> parse_all(const std::vector<std::string>& paths) {
    std::vector<ObjectReference> refs;
    refs.reserve(paths.size());
    for (const auto& p : paths) refs.push_back(*ObjectReference::parse(p));
    return refs;
}

}  // namespace

BuildResult build_home_model(const plant::PlantConfig& cfg, std::shared_ptr<Clock> clock,
                             const std::string& server_name) {
    std::set<std::string> names;
    for (const auto& l : cfg.switch_loads) {
        if (!names.insert(l.name).second) return ModelError::DuplicateName;
    }

    auto m = std::make_shared<ServerModel>(server_name, std::move(clock));

    struct NodeSpec {
        const char* device;
        const char* node;
        const char* node_class;
    };
    const NodeSpec nodes[] = {
        {"PV1", "MMDC1", "MMDC"},  {"PV1", "MMET1", "MMET"}, {"PV1", "MMXU1", "MMXU"},
        {"PV1", "ZINV1", "ZINV"},  {"BAT1", "ZBAT1", "ZBAT"}, {"BAT1", "ZBTC1", "ZBTC"},
        {"LOAD1", "MMXU1", "MMXU"}, {"GRID1", "MMXU1", "MMXU"},
    };
    for (const char* dev : {"PV1", "BAT1", "LOAD1", "GRID1"}) {
        if (auto r = m->add_device(dev); !r) return r.error();
    }
    for (const auto& n : nodes) {
        if (auto r = m->add_node(n.device, n.node, n.node_class); !r) return r.error();
    }

    const float f0 = 0.0f;
    struct AttrSpec {
        const char* path;
        ValueKind kind;
        FuncConstraint fc;
        DataValue initial;
    };
    const AttrSpec attrs[] = {
        {paths::kPvMpptW, ValueKind::Float32, FuncConstraint::MX, f0},
        {paths::kIrr, ValueKind::Float32, FuncConstraint::MX, f0},
        {paths::kPnlTmp, ValueKind::Float32, FuncConstraint::MX, f0},
        {paths::kPvTotW, ValueKind::Float32, FuncConstraint::MX, f0},
        {paths::kInvTarget, ValueKind::Float32, FuncConstraint::SP, f0},
        {paths::kInvMaxW, ValueKind::Float32, FuncConstraint::CF,
         static_cast<float>(cfg.pv_peak_w)},
        {paths::kInvSt, ValueKind::Bool, FuncConstraint::ST, true},
        {paths::kBatW, ValueKind::Float32, FuncConstraint::MX, f0},
        {paths::kSocPct, ValueKind::Float32, FuncConstraint::MX,
         static_cast<float>(cfg.soc_init * 100.0)},
        {paths::kBatMaxCha, ValueKind::Float32, FuncConstraint::CF,
         static_cast<float>(cfg.battery_max_w)},
        {paths::kBatMaxDis, ValueKind::Float32, FuncConstraint::CF,
         static_cast<float>(cfg.battery_max_w)},
        {paths::kBatSt, ValueKind::Bool, FuncConstraint::ST, true},
        {paths::kBatSpt, ValueKind::Float32, FuncConstraint::SP, f0},
        {paths::kLoadTotW, ValueKind::Float32, FuncConstraint::MX, f0},
        {paths::kGridW, ValueKind::Float32, FuncConstraint::MX, f0},
    };
    for (const auto& a : attrs) {
        if (auto r = add_attr(*m, a.path, a.kind, a.fc, a.initial); !r) return r.error();
    }

    std::vector<std::string> switch_tot;
    std::vector<std::string> switch_cmd;
    for (std::size_t i = 0; i < cfg.switch_loads.size(); ++i) {
        std::string node = "MMXU" + std::to_string(i + 2);
        if (auto r = m->add_node("LOAD1", node, "MMXU"); !r) return r.error();
        switch_tot.push_back(paths::switch_load_tot_w(i));
        switch_cmd.push_back(paths::switch_load_cmd(i));
        if (auto r = add_attr(*m, switch_tot.back(), ValueKind::Float32, FuncConstraint::MX, f0);
            !r) {
            return r.error();
        }
        if (auto r = add_attr(*m, switch_cmd.back(), ValueKind::Bool, FuncConstraint::CO, false);
            !r) {
            return r.error();
        }
    }

    std::vector<std::string> meas = {paths::kGridW, paths::kSocPct, paths::kPvTotW,
                                     paths::kLoadTotW};
    std::vector<std::string> cmd = {paths::kBatSpt, paths::kInvTarget};
    cmd.insert(cmd.end(), switch_cmd.begin(), switch_cmd.end());
    std::vector<std::string> bridge = {paths::kPvMpptW, paths::kIrr,     paths::kPnlTmp,
                                       paths::kPvTotW,  paths::kBatW,    paths::kSocPct,
                                       paths::kLoadTotW, paths::kGridW};
    bridge.insert(bridge.end(), switch_tot.begin(), switch_tot.end());

    if (auto r = m->define_dataset(kDsMeas, parse_all(meas)); !r) return r.error();
    if (auto r = m->define_dataset(kDsCmd, parse_all(cmd)); !r) return r.error();
    if (auto r = m->define_dataset(kDsBridge, parse_all(bridge)); !r) return r.error();

    return m;
}

}  // namespace flexgate::model
