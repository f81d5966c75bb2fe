#include "flexgate/bridge/model_link.hpp"

#include <algorithm>
#include <memory>
#include <set>

#include "flexgate/acsi/client.hpp"

namespace flexgate::bridge {

namespace {

LinkError from_model(model::ModelError e) {
    switch (e) {
        case model::ModelError::NotFound: return LinkError::NotFound;
        case model::ModelError::TypeMismatch: return LinkError::TypeMismatch;
        case model::ModelError::AccessDenied: return LinkError::AccessDenied;
        default: return LinkError::ProtocolError;
    }
}

LinkError from_client(acsi::ClientError e) { return static_cast<LinkError>(e); }

}  // namespace

const char* to_string(LinkError e) {
    switch (e) {
        case LinkError::NotFound: return "NotFound";
        case LinkError::TypeMismatch: return "TypeMismatch";
        case LinkError::AccessDenied: return "AccessDenied";
        case LinkError::ProtocolError: return "ProtocolError";
        case LinkError::Transport: return "Transport";
    }
    return "?";
}

DirectLink::DirectLink(model::ServerModel& model) : model_(model) {}

DirectLink::~DirectLink() {
    std::lock_guard lk(mu_);
    for (int id : observer_ids_) model_.remove_write_observer(id);
}

Result<model::DataValue, LinkError> DirectLink::read(const model::ObjectReference& ref) {
    auto r = model_.read(ref);
    if (!r) return from_model(r.error());
    return r.value().first;
}

Result<void, LinkError> DirectLink::write(const model::ObjectReference& ref,
                                          const model::DataValue& value) {
    auto r = model_.write(ref, value, model::WriteChannel::Controller);
    if (!r) return from_model(r.error());
    return {};
}

Result<std::vector<model::ObjectReference>, LinkError> DirectLink::dataset_members(
    const std::string& dataset) {
    auto ds = model_.dataset(dataset);
    if (!ds) return from_model(ds.error());
    return std::move(ds).take().members;
}

Result<void, LinkError> DirectLink::subscribe(const std::string& dataset, ReportFn cb) {
    auto ds = model_.dataset(dataset);
    if (!ds) return from_model(ds.error());
    auto members = std::make_shared<std::set<model::ObjectReference>>(ds.value().members.begin(),
                                                                      ds.value().members.end());
    int id = model_.add_write_observer(
        [this, dataset, members, cb = std::move(cb)](const model::ObjectReference& ref,
                                                     const model::DataValue&, model::TimestampUs) {
            if (!members->count(ref)) return;
            auto snap = model_.snapshot_dataset(dataset);
            if (snap) cb(snap.value());
        });
    std::lock_guard lk(mu_);
    observer_ids_.push_back(id);
    return {};
}

AcsiLink::AcsiLink(acsi::AcsiClient& client,
                   std::map<std::string, std::vector<model::ObjectReference>> datasets)
    : client_(client), datasets_(std::move(datasets)) {}

Result<model::DataValue, LinkError> AcsiLink::read(const model::ObjectReference& ref) {
    auto r = client_.read(ref);
    if (!r) return from_client(r.error());
    return r.value().first;
}

Result<void, LinkError> AcsiLink::write(const model::ObjectReference& ref,
                                        const model::DataValue& value) {
    auto r = client_.write(ref, value);
    if (!r) return from_client(r.error());
    return {};
}

Result<std::vector<model::ObjectReference>, LinkError> AcsiLink::dataset_members(
    const std::string& dataset) {
    auto it = datasets_.find(dataset);
    if (it == datasets_.end()) return LinkError::NotFound;
    return it->second;
}

Result<void, LinkError> AcsiLink::subscribe(const std::string& dataset, ReportFn cb) {
    if (!datasets_.count(dataset)) return LinkError::NotFound;
    acsi::ReportControl rcb = acsi::ReportControl::on_change(dataset);
    auto r = client_.subscribe_report(
        rcb, [cb = std::move(cb)](const std::string&, const std::vector<model::DataValue>& values) {
            cb(values);
        });
    if (!r) return from_client(r.error());
    return {};
}

}  // namespace flexgate::bridge
