#include "flexgate/goose/mirror.hpp"

namespace flexgate::goose {

GooseMirror::GooseMirror(std::shared_ptr<model::ServerModel> model, std::string dataset,
                         std::shared_ptr<Publisher> publisher, std::shared_ptr<Clock> clock,
                         std::function<void()> after_publish)
    : model_(std::move(model)),
      dataset_(std::move(dataset)),
      publisher_(std::move(publisher)),
      clock_(std::move(clock)),
      after_publish_(std::move(after_publish)) {}

GooseMirror::~GooseMirror() { detach(); }

Result<void, model::ModelError> GooseMirror::attach() {
    auto ds = model_->dataset(dataset_);
    if (!ds) return ds.error();
    members_ = std::set<model::ObjectReference>(ds.value().members.begin(),
                                                ds.value().members.end());
    observer_id_ = model_->add_write_observer(
        [this](const model::ObjectReference& ref, const model::DataValue&, model::TimestampUs) {
            if (!members_.contains(ref)) return;
            auto snap = model_->snapshot_dataset(dataset_);
            if (!snap) return;
            publisher_->publish_state_change(std::move(snap).take(), clock_->now_us());
            if (after_publish_) after_publish_();
        });
    return {};
}

void GooseMirror::detach() {
    if (observer_id_ >= 0) {
        model_->remove_write_observer(observer_id_);
        observer_id_ = -1;
    }
}

}  // namespace flexgate::goose
