#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "flexgate/acsi/protocol.hpp"
#include "flexgate/common/result.hpp"
#include "flexgate/model/object_reference.hpp"
#include "flexgate/model/value.hpp"

namespace flexgate::acsi {

enum class ClientError : std::uint8_t {
    NotFound = 1,
    TypeMismatch = 2,
    AccessDenied = 3,
    ProtocolError = 4,
    Transport = 5,
};

const char* to_string(ClientError e);

// Blocking client with one outstanding request at a time. A reader thread
// demultiplexes responses from unsolicited report pushes.
class AcsiClient {
public:
    using ReportCallback =
        std::function<void(const std::string& dataset, const std::vector<model::DataValue>&)>;

    static Result<std::unique_ptr<AcsiClient>, ClientError> connect(const std::string& host,
                                                                    std::uint16_t port);
    ~AcsiClient();

    AcsiClient(const AcsiClient&) = delete;
    AcsiClient& operator=(const AcsiClient&) = delete;

    Result<std::vector<model::ObjectReference>, ClientError> browse(const std::string& prefix);
    Result<std::pair<model::DataValue, model::TimestampUs>, ClientError> read(
        const model::ObjectReference& ref);
    Result<void, ClientError> write(const model::ObjectReference& ref,
                                    const model::DataValue& value);
    Result<void, ClientError> subscribe_report(const ReportControl& rcb, ReportCallback cb);

    void close();

private:
    AcsiClient() = default;
    Result<Envelope, ClientError> request(const Envelope& req);
    void reader_loop();

    int fd_ = -1;
    std::thread reader_;
    std::mutex req_mu_;
    std::mutex state_mu_;
    std::condition_variable resp_cv_;
    std::optional<Envelope> pending_resp_;
    bool down_ = false;
    std::map<std::string, ReportCallback> report_cbs_;
};

}  // namespace flexgate::acsi
