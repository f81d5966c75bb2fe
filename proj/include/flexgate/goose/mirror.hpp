#pragma once

#include <memory>
#include <set>

#include "flexgate/goose/publisher.hpp"
#include "flexgate/model/server_model.hpp"

namespace flexgate::goose {

// Couples a model dataset to a Publisher: every committed write to a member
// publishes a fresh dataset snapshot as a state change. Detach before the
// model outlives the mirror.
class GooseMirror {
public:
    GooseMirror(std::shared_ptr<model::ServerModel> model, std::string dataset,
                std::shared_ptr<Publisher> publisher, std::shared_ptr<Clock> clock,
                std::function<void()> after_publish = nullptr);
    ~GooseMirror();

    GooseMirror(const GooseMirror&) = delete;
    GooseMirror& operator=(const GooseMirror&) = delete;

    Result<void, model::ModelError> attach();
    void detach();

    std::shared_ptr<Publisher> publisher() const { return publisher_; }

private:
    std::shared_ptr<model::ServerModel> model_;
    std::string dataset_;
    std::shared_ptr<Publisher> publisher_;
    std::shared_ptr<Clock> clock_;
    std::function<void()> after_publish_;
    std::set<model::ObjectReference> members_;
    int observer_id_ = -1;
};

}  // namespace flexgate::goose
