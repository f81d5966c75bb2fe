#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "flexgate/common/result.hpp"
#include "flexgate/model/object_reference.hpp"
#include "flexgate/model/server_model.hpp"
#include "flexgate/model/value.hpp"

namespace flexgate::acsi {
class AcsiClient;
}

namespace flexgate::bridge {

enum class LinkError : std::uint8_t {
    NotFound = 1,
    TypeMismatch = 2,
    AccessDenied = 3,
    ProtocolError = 4,
    Transport = 5,
};

const char* to_string(LinkError e);

// Uniform access to a device model, either in-process or over acsi. Reports
// deliver dataset values positionally; dataset_members() gives the matching
// reference order.
class ModelLink {
public:
    using ReportFn = std::function<void(const std::vector<model::DataValue>&)>;

    virtual ~ModelLink() = default;

    virtual Result<model::DataValue, LinkError> read(const model::ObjectReference& ref) = 0;
    virtual Result<void, LinkError> write(const model::ObjectReference& ref,
                                          const model::DataValue& value) = 0;
    virtual Result<std::vector<model::ObjectReference>, LinkError> dataset_members(
        const std::string& dataset) = 0;
    virtual Result<void, LinkError> subscribe(const std::string& dataset, ReportFn cb) = 0;
};

// Direct attachment to a ServerModel in the same process. Writes go through
// the controller channel; subscriptions snapshot the dataset on each member
// write, in commit order.
class DirectLink : public ModelLink {
public:
    explicit DirectLink(model::ServerModel& model);
    ~DirectLink() override;

    Result<model::DataValue, LinkError> read(const model::ObjectReference& ref) override;
    Result<void, LinkError> write(const model::ObjectReference& ref,
                                  const model::DataValue& value) override;
    Result<std::vector<model::ObjectReference>, LinkError> dataset_members(
        const std::string& dataset) override;
    Result<void, LinkError> subscribe(const std::string& dataset, ReportFn cb) override;

private:
    model::ServerModel& model_;
    std::mutex mu_;
    std::vector<int> observer_ids_;
};

// Remote attachment over an established acsi connection. Dataset membership
// is configured up front, mirroring how 61850 clients are provisioned.
class AcsiLink : public ModelLink {
public:
    AcsiLink(acsi::AcsiClient& client,
             std::map<std::string, std::vector<model::ObjectReference>> datasets);

    Result<model::DataValue, LinkError> read(const model::ObjectReference& ref) override;
    Result<void, LinkError> write(const model::ObjectReference& ref,
                                  const model::DataValue& value) override;
    Result<std::vector<model::ObjectReference>, LinkError> dataset_members(
        const std::string& dataset) override;
    Result<void, LinkError> subscribe(const std::string& dataset, ReportFn cb) override;

private:
    acsi::AcsiClient& client_;
    std::map<std::string, std::vector<model::ObjectReference>> datasets_;
};

}  // namespace flexgate::bridge
