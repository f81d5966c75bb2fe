#pragma once

#include <string>

#include "flexgate/common/result.hpp"
#include "flexgate/model/object_reference.hpp"

namespace flexgate::bridge {

enum class MappingError : std::uint8_t { BadEntityId, BadAttribute };

const char* to_string(MappingError e);

struct EntityAddress {
    std::string entity_id;
    std::string attr;

    friend bool operator==(const EntityAddress&, const EntityAddress&) = default;
};

// Deterministic rule: "LD/LN.DO.DA" <-> entity "urn:dev:{LD}-{LN}" attribute
// "{DO}_{DA}". Bijective as long as model names avoid '-' and '_', which the
// home model guarantees.
EntityAddress to_entity(const model::ObjectReference& ref);
Result<model::ObjectReference, MappingError> to_model_path(const std::string& entity_id,
                                                           const std::string& attr);

// Device ids map to "urn:dev:{deviceId}".
std::string device_entity_id(const std::string& device_id);
Result<std::string, MappingError> entity_device_id(const std::string& entity_id);

// Command attributes are the ones a bridge may write back into the model.
bool is_command_attr(const std::string& attr);

}  // namespace flexgate::bridge
