#pragma once

#include <cstddef>
#include <memory>
#include <string>

#include "flexgate/model/server_model.hpp"
#include "flexgate/plant/config.hpp"

namespace flexgate::model {

// Canonical attribute paths of the residential home model.
namespace paths {

inline constexpr const char* kPvMpptW = "PV1/MMDC1.Watt.mag";
inline constexpr const char* kIrr = "PV1/MMET1.Irr.mag";
inline constexpr const char* kPnlTmp = "PV1/MMET1.PnlTmp.mag";
inline constexpr const char* kPvTotW = "PV1/MMXU1.TotW.mag";
inline constexpr const char* kInvTarget = "PV1/ZINV1.OutWSet.setMag";
inline constexpr const char* kInvMaxW = "PV1/ZINV1.MaxW.setMag";
inline constexpr const char* kInvSt = "PV1/ZINV1.InvSt.stVal";
inline constexpr const char* kBatW = "BAT1/ZBAT1.Watt.mag";
inline constexpr const char* kSocPct = "BAT1/ZBAT1.SocPct.mag";
inline constexpr const char* kBatMaxCha = "BAT1/ZBAT1.MaxWCha.setMag";
inline constexpr const char* kBatMaxDis = "BAT1/ZBAT1.MaxWDis.setMag";
inline constexpr const char* kBatSt = "BAT1/ZBAT1.BatSt.stVal";
inline constexpr const char* kBatSpt = "BAT1/ZBTC1.WSpt.setMag";
inline constexpr const char* kLoadTotW = "LOAD1/MMXU1.TotW.mag";
inline constexpr const char* kGridW = "GRID1/MMXU1.TotW.mag";

// Switchable load i (0-based) lives in LOAD1/MMXU{i+2}.
std::string switch_load_tot_w(std::size_t idx);
std::string switch_load_cmd(std::size_t idx);

}  // namespace paths

// Default dataset names declared by the builder.
inline constexpr const char* kDsMeas = "dsMeas";
inline constexpr const char* kDsCmd = "dsCmd";
inline constexpr const char* kDsBridge = "dsBridge";

// Builds the full prosumer device model (PV1, BAT1, LOAD1, GRID1) with
// datasets dsMeas, dsCmd and dsBridge declared. Fails on duplicate switchable
// load names.
Result<std::shared_ptr<ServerModel>, ModelError> build_home_model(
    const plant::PlantConfig& cfg, std::shared_ptr<Clock> clock = wall_clock(),
    const std::string& server_name = "home1");

}  // namespace flexgate::model
