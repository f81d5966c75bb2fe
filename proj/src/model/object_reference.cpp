#include "flexgate/model/object_reference.hpp"

namespace flexgate::model {

namespace {

bool valid_segment(std::string_view s) {
    return !s.empty() && s.find('/') == std::string_view::npos &&
           s.find('.') == std::string_view::npos;
}

}  // namespace

ObjectReference::ObjectReference(std::string device, std::string node, std::string object,
                                 std::string attribute)
    : device_(std::move(device)),
      node_(std::move(node)),
      object_(std::move(object)),
      attribute_(std::move(attribute)) {}

std::optional<ObjectReference> ObjectReference::parse(std::string_view text) {
    auto slash = text.find('/');
    if (slash == std::string_view::npos) return std::nullopt;
    std::string_view device = text.substr(0, slash);
    std::string_view rest = text.substr(slash + 1);

    auto d1 = rest.find('.');
    if (d1 == std::string_view::npos) return std::nullopt;
    auto d2 = rest.find('.', d1 + 1);
    if (d2 == std::string_view::npos) return std::nullopt;

    std::string_view node = rest.substr(0, d1);
    std::string_view object = rest.substr(d1 + 1, d2 - d1 - 1);
    std::string_view attribute = rest.substr(d2 + 1);

    if (!valid_segment(device) || !valid_segment(node) || !valid_segment(object) ||
        !valid_segment(attribute)) {
        return std::nullopt;
    }
    return ObjectReference(std::string(device), std::string(node), std::string(object),
                           std::string(attribute));
}

std::string ObjectReference::str() const {
    std::string s;
    s.reserve(device_.size() + node_.size() + object_.size() + attribute_.size() + 3);
    s += device_;
    s += '/';
    s += node_;
    s += '.';
    s += object_;
    s += '.';
    s += attribute_;
    return s;
}

}  // namespace flexgate::model
