#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "flexgate/common/clock.hpp"
#include "flexgate/common/result.hpp"
#include "flexgate/model/object_reference.hpp"
#include "flexgate/model/value.hpp"

namespace flexgate::model {

// Functional constraint of a data attribute: measurements (MX), status (ST),
// controls (CO), setpoints (SP), configuration (CF).
enum class FuncConstraint : std::uint8_t { MX, ST, CO, SP, CF };

// Who is performing a write. The plant owns MX/ST, controllers own CO/SP/CF.
enum class WriteChannel : std::uint8_t { Plant, Controller };

enum class ModelError : std::uint8_t {
    NotFound,
    TypeMismatch,
    AccessDenied,
    DuplicateName,
    EmptyDataSet,
    BadReference,
};

const char* to_string(FuncConstraint fc);
const char* to_string(ModelError e);

bool channel_may_write(FuncConstraint fc, WriteChannel ch);

struct AttributeInfo {
    ValueKind kind;
    FuncConstraint fc;
};

struct DataSet {
    std::string name;
    std::vector<ObjectReference> members;
};

// Hierarchical device model: LogicalDevice -> LogicalNode -> DataObject ->
// DataAttribute. All access is serialized through one internal mutex; write
// observers run synchronously in commit order.
class ServerModel {
public:
    using WriteObserver =
        std::function<void(const ObjectReference&, const DataValue&, TimestampUs)>;

    explicit ServerModel(std::string name, std::shared_ptr<Clock> clock = wall_clock());

    const std::string& name() const { return name_; }

    Result<void, ModelError> add_device(const std::string& device);
    Result<void, ModelError> add_node(const std::string& device, const std::string& node,
                                      std::string node_class);
    Result<void, ModelError> add_attribute(const ObjectReference& ref, ValueKind kind,
                                           FuncConstraint fc, DataValue initial);

    Result<AttributeInfo, ModelError> resolve(const ObjectReference& ref) const;
    Result<AttributeInfo, ModelError> resolve(std::string_view path) const;

    Result<std::pair<DataValue, TimestampUs>, ModelError> read(const ObjectReference& ref) const;
    Result<std::pair<DataValue, TimestampUs>, ModelError> read(std::string_view path) const;

    Result<void, ModelError> write(const ObjectReference& ref, DataValue value, WriteChannel ch);
    Result<void, ModelError> write(std::string_view path, DataValue value, WriteChannel ch);

    // All attribute paths under the given prefix ("" = whole model), in
    // lexicographic order of the full path string.
    std::vector<ObjectReference> browse(std::string_view prefix = "") const;

    Result<void, ModelError> define_dataset(const std::string& name,
                                            std::vector<ObjectReference> members);
    Result<DataSet, ModelError> dataset(const std::string& name) const;
    Result<std::vector<DataValue>, ModelError> snapshot_dataset(const std::string& name) const;
    std::vector<std::string> dataset_names() const;

    int add_write_observer(WriteObserver fn);
    void remove_write_observer(int id);

private:
    struct DataAttribute {
        ValueKind kind;
        FuncConstraint fc;
        DataValue value;
        std::uint64_t ts_us = 0;
    };
    struct DataObject {
        std::map<std::string, DataAttribute> attrs;
    };
    struct LogicalNode {
        std::string node_class;
        std::map<std::string, DataObject> objects;
    };
    struct LogicalDevice {
        std::map<std::string, LogicalNode> nodes;
    };

    DataAttribute* find(const ObjectReference& ref);
    const DataAttribute* find(const ObjectReference& ref) const;

    std::string name_;
    std::shared_ptr<Clock> clock_;
    mutable std::recursive_mutex mu_;
    std::map<std::string, LogicalDevice> devices_;
    std::map<std::string, DataSet> datasets_;
    std::vector<std::pair<int, WriteObserver>> observers_;
    int next_observer_id_ = 1;
};

}  // namespace flexgate::model
