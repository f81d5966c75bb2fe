#include "flexgate/bridge/mapping.hpp"

namespace flexgate::bridge {

namespace {
constexpr const char kUrnPrefix[] = "urn:dev:";
constexpr std::size_t kUrnPrefixLen = sizeof(kUrnPrefix) - 1;

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() &&
           s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}
}  // namespace

const char* to_string(MappingError e) {
    switch (e) {
        case MappingError::BadEntityId: return "BadEntityId";
        case MappingError::BadAttribute: return "BadAttribute";
    }
    return "?";
}

EntityAddress to_entity(const model::ObjectReference& ref) {
    return EntityAddress{kUrnPrefix + ref.device() + "-" + ref.node(),
                         ref.object() + "_" + ref.attribute()};
}

Result<model::ObjectReference, MappingError> to_model_path(const std::string& entity_id,
                                                           const std::string& attr) {
    if (entity_id.rfind(kUrnPrefix, 0) != 0) return MappingError::BadEntityId;
    std::string rest = entity_id.substr(kUrnPrefixLen);
    auto dash = rest.find('-');
    if (dash == std::string::npos || dash == 0 || dash + 1 == rest.size()) {
        return MappingError::BadEntityId;
    }
    auto underscore = attr.find('_');
    if (underscore == std::string::npos || underscore == 0 || underscore + 1 == attr.size()) {
        return MappingError::BadAttribute;
    }
    auto ref = model::ObjectReference::parse(rest.substr(0, dash) + "/" + rest.substr(dash + 1) +
                                             "." + attr.substr(0, underscore) + "." +
                                             attr.substr(underscore + 1));
    if (!ref) return MappingError::BadAttribute;
    return *ref;
}

std::string device_entity_id(const std::string& device_id) { return kUrnPrefix + device_id; }

Result<std::string, MappingError> entity_device_id(const std::string& entity_id) {
    if (entity_id.rfind(kUrnPrefix, 0) != 0 || entity_id.size() == kUrnPrefixLen) {
        return MappingError::BadEntityId;
    }
    return entity_id.substr(kUrnPrefixLen);
}

bool is_command_attr(const std::string& attr) {
    return ends_with(attr, "_setMag") || ends_with(attr, "_ctlVal");
}

}  // namespace flexgate::bridge
