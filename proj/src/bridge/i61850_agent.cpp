#include "flexgate/bridge/i61850_agent.hpp"

#include <cstdio>
#include <optional>

#include "flexgate/bridge/mapping.hpp"

namespace flexgate::bridge {

namespace {

broker::Json value_to_json(const model::DataValue& v) {
    using Json = broker::Json;
    switch (model::kind_of(v)) {
        case model::ValueKind::Bool: return Json(std::get<bool>(v));
        case model::ValueKind::Int32: return Json(std::get<std::int32_t>(v));
        case model::ValueKind::Float32: return Json(static_cast<double>(std::get<float>(v)));
        case model::ValueKind::Float64: return Json(std::get<double>(v));
        case model::ValueKind::Text: return Json(std::get<std::string>(v));
        case model::ValueKind::TimestampUs: return Json(std::get<model::TimestampUs>(v).us);
    }
    return Json();
}

std::optional<model::DataValue> coerce(const broker::Json& v, model::ValueKind kind) {
    switch (kind) {
        case model::ValueKind::Bool:
            if (v.is_boolean()) return model::DataValue(v.get<bool>());
            return std::nullopt;
        case model::ValueKind::Int32:
            if (v.is_number()) {
                return model::DataValue(static_cast<std::int32_t>(v.get<double>()));
            }
            return std::nullopt;
        case model::ValueKind::Float32:
            if (v.is_number()) return model::DataValue(static_cast<float>(v.get<double>()));
            return std::nullopt;
        case model::ValueKind::Float64:
            if (v.is_number()) return model::DataValue(v.get<double>());
            return std::nullopt;
        case model::ValueKind::Text:
            if (v.is_string()) return model::DataValue(v.get<std::string>());
            return std::nullopt;
        case model::ValueKind::TimestampUs:
            if (v.is_number()) {
                return model::DataValue(
                    model::TimestampUs{static_cast<std::uint64_t>(v.get<double>())});
            }
            return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace

I61850Agent::I61850Agent(broker::ContextStore& store, ModelLink& link, I61850Config cfg)
    : store_(store), link_(link), cfg_(std::move(cfg)) {}

I61850Agent::~I61850Agent() { stop(); }

void I61850Agent::push_snapshot(const std::vector<model::ObjectReference>& members,
                                const std::vector<model::DataValue>& values) {
    if (members.size() != values.size()) return;
    std::map<std::string, broker::Entity> per_entity;
    for (std::size_t i = 0; i < members.size(); ++i) {
        EntityAddress addr = to_entity(members[i]);
        broker::Entity& e = per_entity[addr.entity_id];
        e.id = addr.entity_id;
        e.type = cfg_.entity_type;
        broker::Attribute a;
        a.value = value_to_json(values[i]);
        a.type = to_string(model::kind_of(values[i]));
        e.attrs.emplace(addr.attr, std::move(a));
        {
            std::lock_guard lk(kinds_mu_);
            kinds_.emplace(members[i].str(), model::kind_of(values[i]));
        }
    }
    for (const auto& [id, e] : per_entity) {
        (void)id;
        (void)store_.upsert(e);
    }
}

Result<model::ValueKind, LinkError> I61850Agent::kind_for(const model::ObjectReference& ref) {
    {
        std::lock_guard lk(kinds_mu_);
        auto it = kinds_.find(ref.str());
        if (it != kinds_.end()) return it->second;
    }
    auto value = link_.read(ref);
    if (!value) return value.error();
    model::ValueKind kind = model::kind_of(value.value());
    std::lock_guard lk(kinds_mu_);
    kinds_.emplace(ref.str(), kind);
    return kind;
}

void I61850Agent::on_broker_change(const broker::Notification& n) {
    for (const auto& [attr, attribute] : n.changes.attrs) {
        if (!is_command_attr(attr)) continue;
        auto ref = to_model_path(n.changes.id, attr);
        if (!ref) continue;
        std::string error;
        auto kind = kind_for(ref.value());
        if (!kind) {
            error = to_string(kind.error());
        } else {
            auto value = coerce(attribute.value, kind.value());
            if (!value) {
                error = "TypeMismatch";
            } else {
                auto w = link_.write(ref.value(), *value);
                if (!w) error = to_string(w.error());
            }
        }
        if (error.empty()) {
            command_writes_.fetch_add(1);
            continue;
        }
        command_errors_.fetch_add(1);
        std::fprintf(stderr, "[61850-agent] write %s <- %s failed: %s\n",
                     ref.value().str().c_str(), attribute.value.dump().c_str(), error.c_str());
        broker::Attribute note;
        note.value = error + " writing " + attr;
        note.type = "Text";
        (void)store_.update_attrs(n.changes.id, {{"last_error", note}});
    }
}

Result<void, LinkError> I61850Agent::start() {
    if (running_) return {};
    for (const auto& ds : cfg_.datasets) {
        auto members = link_.dataset_members(ds);
        if (!members) return members.error();
        std::vector<model::DataValue> initial;
        initial.reserve(members.value().size());
        for (const auto& ref : members.value()) {
            auto v = link_.read(ref);
            if (!v) return v.error();
            initial.push_back(std::move(v).take());
        }
        push_snapshot(members.value(), initial);
        auto sub = link_.subscribe(ds, [this, members = members.value()](
                                           const std::vector<model::DataValue>& values) {
            push_snapshot(members, values);
        });
        if (!sub) return sub.error();
    }
    sub_id_ = store_.subscribe_callback(
        "urn:dev:*", {}, [this](const broker::Notification& n) { on_broker_change(n); });
    running_ = true;
    return {};
}

void I61850Agent::stop() {
    if (!running_) return;
    running_ = false;
    store_.remove_subscription(sub_id_);
    store_.flush_notifications();
}

}  // namespace flexgate::bridge
