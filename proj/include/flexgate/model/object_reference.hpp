#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace flexgate::model {

// Path of the form "LD/LN.DO.DA" naming one data attribute in a server model.
// All four segments are non-empty and free of the separator characters, so
// str() and parse() round-trip exactly.
class ObjectReference {
public:
    ObjectReference() = default;
    ObjectReference(std::string device, std::string node, std::string object, std::string attribute);

    static std::optional<ObjectReference> parse(std::string_view text);

    const std::string& device() const { return device_; }
    const std::string& node() const { return node_; }
    const std::string& object() const { return object_; }
    const std::string& attribute() const { return attribute_; }

    std::string str() const;

    friend bool operator==(const ObjectReference&, const ObjectReference&) = default;
    friend auto operator<=>(const ObjectReference&, const ObjectReference&) = default;

private:
    std::string device_;
    std::string node_;
    std::string object_;
    std::string attribute_;
};

}  // namespace flexgate::model
