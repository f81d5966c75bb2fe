#include "flexgate/model/server_model.hpp"

#include <algorithm>

namespace flexgate::model {

const char* to_string(ValueKind k) {
    switch (k) {
        case ValueKind::Bool: return "Bool";
        case ValueKind::Int32: return "Int32";
        case ValueKind::Float32: return "Float32";
        case ValueKind::Float64: return "Float64";
        case ValueKind::Text: return "Text";
        case ValueKind::TimestampUs: return "TimestampUs";
    }
    return "?";
}

const char* to_string(FuncConstraint fc) {
    switch (fc) {
        case FuncConstraint::MX: return "MX";
        case FuncConstraint::ST: return "ST";
        case FuncConstraint::CO: return "CO";
        case FuncConstraint::SP: return "SP";
        case FuncConstraint::CF: return "CF";
    }
    return "?";
}

const char* to_string(ModelError e) {
    switch (e) {
        case ModelError::NotFound: return "NotFound";
        case ModelError::TypeMismatch: return "TypeMismatch";
        case ModelError::AccessDenied: return "AccessDenied";
        case ModelError::DuplicateName: return "DuplicateName";
        case ModelError::EmptyDataSet: return "EmptyDataSet";
        case ModelError::BadReference: return "BadReference";
    }
    return "?";
}

bool channel_may_write(FuncConstraint fc, WriteChannel ch) {
    switch (fc) {
        case FuncConstraint::MX:
        case FuncConstraint::ST:
            return ch == WriteChannel::Plant;
        case FuncConstraint::CO:
        case FuncConstraint::SP:
        case FuncConstraint::CF:
            return ch == WriteChannel::Controller;
    }
    return false;
}

ServerModel::ServerModel(std::string name, std::shared_ptr<Clock> clock)
    : name_(std::move(name)), clock_(std::move(clock)) {}

Result<void, ModelError> ServerModel::add_device(const std::string& device) {
    if (device.empty() || device.find('/') != std::string::npos ||
        device.find('.') != std::string::npos) {
        return ModelError::BadReference;
    }
    std::lock_guard lk(mu_);
    auto [it, inserted] = devices_.try_emplace(device);
    (void)it;
    if (!inserted) return ModelError::DuplicateName;
    return {};
}

Result<void, ModelError> ServerModel::add_node(const std::string& device, const std::string& node,
                                               std::string node_class) {
    if (node.empty() || node.find('/') != std::string::npos ||
        node.find('.') != std::string::npos) {
        return ModelError::BadReference;
    }
    std::lock_guard lk(mu_);
    auto dev = devices_.find(device);
    if (dev == devices_.end()) return ModelError::NotFound;
    auto [it, inserted] = dev->second.nodes.try_emplace(node);
    if (!inserted) return ModelError::DuplicateName;
    it->second.node_class = std::move(node_class);
    return {};
}

Result<void, ModelError> ServerModel::add_attribute(const ObjectReference& ref, ValueKind kind,
                                                    FuncConstraint fc, DataValue initial) {
    if (kind_of(initial) != kind) return ModelError::TypeMismatch;
    std::lock_guard lk(mu_);
    auto dev = devices_.find(ref.device());
    if (dev == devices_.end()) return ModelError::NotFound;
    auto node = dev->second.nodes.find(ref.node());
    if (node == dev->second.nodes.end()) return ModelError::NotFound;
    auto& dobj = node->second.objects[ref.object()];
    auto [it, inserted] = dobj.attrs.try_emplace(ref.attribute());
    if (!inserted) return ModelError::DuplicateName;
    it->second = DataAttribute{kind, fc, std::move(initial), clock_->now_us()};
    return {};
}

ServerModel::DataAttribute* ServerModel::find(const ObjectReference& ref) {
    auto dev = devices_.find(ref.device());
    if (dev == devices_.end()) return nullptr;
    auto node = dev->second.nodes.find(ref.node());
    if (node == dev->second.nodes.end()) return nullptr;
    auto dobj = node->second.objects.find(ref.object());
    if (dobj == node->second.objects.end()) return nullptr;
    auto attr = dobj->second.attrs.find(ref.attribute());
    if (attr == dobj->second.attrs.end()) return nullptr;
    return &attr->second;
}

const ServerModel::DataAttribute* ServerModel::find(const ObjectReference& ref) const {
    return const_cast<ServerModel*>(this)->find(ref);
}

Result<AttributeInfo, ModelError> ServerModel::resolve(const ObjectReference& ref) const {
    std::lock_guard lk(mu_);
    const auto* a = find(ref);
    if (!a) return ModelError::NotFound;
    return AttributeInfo{a->kind, a->fc};
}

Result<AttributeInfo, ModelError> ServerModel::resolve(std::string_view path) const {
    auto ref = ObjectReference::parse(path);
    if (!ref) return ModelError::BadReference;
    return resolve(*ref);
}

Result<std::pair<DataValue, TimestampUs>, ModelError> ServerModel::read(
    const ObjectReference& ref) const {
    std::lock_guard lk(mu_);
    const auto* a = find(ref);
    if (!a) return ModelError::NotFound;
    return std::pair<DataValue, TimestampUs>{a->value, TimestampUs{a->ts_us}};
}

Result<std::pair<DataValue, TimestampUs>, ModelError> ServerModel::read(
    std::string_view path) const {
    auto ref = ObjectReference::parse(path);
    if (!ref) return ModelError::BadReference;
    return read(*ref);
}

Result<void, ModelError> ServerModel::write(const ObjectReference& ref, DataValue value,
                                            WriteChannel ch) {
    std::vector<std::pair<int, WriteObserver>> observers;
    TimestampUs stamped{};
    {
        std::lock_guard lk(mu_);
        auto* a = find(ref);
        if (!a) return ModelError::NotFound;
        if (kind_of(value) != a->kind) return ModelError::TypeMismatch;
        if (!channel_may_write(a->fc, ch)) return ModelError::AccessDenied;
        a->ts_us = std::max(a->ts_us, clock_->now_us());
        a->value = std::move(value);
        stamped = TimestampUs{a->ts_us};
        observers = observers_;
        // Observers run with the lock held (the mutex is recursive), so every
        // observer sees writes in commit order and may read back the model.
        for (auto& [id, fn] : observers) {
            (void)id;
            fn(ref, a->value, stamped);
        }
    }
    return {};
}

Result<void, ModelError> ServerModel::write(std::string_view path, DataValue value,
                                            WriteChannel ch) {
    auto ref = ObjectReference::parse(path);
    if (!ref) return ModelError::BadReference;
    return write(*ref, std::move(value), ch);
}

std::vector<ObjectReference> ServerModel::browse(std::string_view prefix) const {
    std::lock_guard lk(mu_);
    std::vector<ObjectReference> out;
    for (const auto& [dname, dev] : devices_) {
        for (const auto& [nname, node] : dev.nodes) {
            for (const auto& [oname, dobj] : node.objects) {
                for (const auto& [aname, attr] : dobj.attrs) {
                    (void)attr;
                    ObjectReference ref(dname, nname, oname, aname);
                    if (prefix.empty() || ref.str().starts_with(prefix)) {
                        out.push_back(std::move(ref));
                    }
                }
            }
        }
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.str() < b.str(); });
    return out;
}

Result<void, ModelError> ServerModel::define_dataset(const std::string& name,
                                                     std::vector<ObjectReference> members) {
    if (members.empty()) return ModelError::EmptyDataSet;
    std::lock_guard lk(mu_);
    for (const auto& m : members) {
        if (!find(m)) return ModelError::NotFound;
    }
    if (datasets_.contains(name)) return ModelError::DuplicateName;
    datasets_.emplace(name, DataSet{name, std::move(members)});
    return {};
}

Result<DataSet, ModelError> ServerModel::dataset(const std::string& name) const {
    std::lock_guard lk(mu_);
    auto it = datasets_.find(name);
    if (it == datasets_.end()) return ModelError::NotFound;
    return it->second;
}

Result<std::vector<DataValue>, ModelError> ServerModel::snapshot_dataset(
    const std::string& name) const {
    std::lock_guard lk(mu_);
    auto it = datasets_.find(name);
    if (it == datasets_.end()) return ModelError::NotFound;
    std::vector<DataValue> out;
    out.reserve(it->second.members.size());
    for (const auto& m : it->second.members) {
        const auto* a = find(m);
        if (!a) return ModelError::NotFound;
        out.push_back(a->value);
    }
    return out;
}

std::vector<std::string> ServerModel::dataset_names() const {
    std::lock_guard lk(mu_);
    std::vector<std::string> names;
    names.reserve(datasets_.size());
    for (const auto& [n, ds] : datasets_) {
        (void)ds;
        names.push_back(n);
    }
    return names;
}

int ServerModel::add_write_observer(WriteObserver fn) {
    std::lock_guard lk(mu_);
    int id = next_observer_id_++;
    observers_.emplace_back(id, std::move(fn));
    return id;
}

void ServerModel::remove_write_observer(int id) {
    std::lock_guard lk(mu_);
    std::erase_if(observers_, [id](const auto& p) { return p.first == id; });
}

}  // namespace flexgate::model
