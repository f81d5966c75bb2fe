#include "flexgate/broker/service.hpp"

#include <httplib.h>

namespace flexgate::broker {

namespace {

void reply_json(httplib::Response& res, int status, const Json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& message) {
    reply_json(res, status, Json{{"error", message}});
}

}  // namespace

BrokerService::BrokerService(ContextStore& store, BrokerConfig cfg)
    : store_(store), cfg_(std::move(cfg)), svr_(std::make_unique<httplib::Server>()) {}

BrokerService::~BrokerService() { stop(); }

std::string BrokerService::base_url() const {
    return "http://" + cfg_.bind + ":" + std::to_string(port_);
}

void BrokerService::install_routes() {
    svr_->Post("/v2/entities", [this](const httplib::Request& req, httplib::Response& res) {
        Json j = Json::parse(req.body, nullptr, false);
        if (j.is_discarded()) return reply_error(res, 400, "invalid JSON");
        auto entity = entity_from_json(j);
        if (!entity) return reply_error(res, 400, to_string(entity.error()));
        auto r = store_.upsert(entity.value());
        if (!r) return reply_error(res, 400, to_string(r.error()));
        res.status = 201;
        res.set_header("Location", "/v2/entities/" + entity.value().id);
    });

    svr_->Get("/v2/entities", [this](const httplib::Request& req, httplib::Response& res) {
        std::string type = req.get_param_value("type");
        Json out = Json::array();
        for (const auto& e : store_.query_type(type)) out.push_back(entity_to_json(e, true));
        reply_json(res, 200, out);
    });

    svr_->Get(R"(/v2/entities/([^/]+))",
              [this](const httplib::Request& req, httplib::Response& res) {
                  auto e = store_.get(req.matches[1]);
                  if (!e) return reply_error(res, 404, to_string(e.error()));
                  reply_json(res, 200, entity_to_json(e.value(), true));
              });

    svr_->Patch(R"(/v2/entities/([^/]+)/attrs)",
                [this](const httplib::Request& req, httplib::Response& res) {
                    Json j = Json::parse(req.body, nullptr, false);
                    if (j.is_discarded()) return reply_error(res, 400, "invalid JSON");
                    auto attrs = attrs_from_json(j);
                    if (!attrs) return reply_error(res, 400, to_string(attrs.error()));
                    auto r = store_.update_attrs(req.matches[1], attrs.value());
                    if (!r) {
                        int status = r.error() == StoreError::NotFound ? 404 : 400;
                        return reply_error(res, status, to_string(r.error()));
                    }
                    res.status = 204;
                });

    svr_->Post("/v2/subscriptions", [this](const httplib::Request& req, httplib::Response& res) {
        Json j = Json::parse(req.body, nullptr, false);
        if (j.is_discarded() || !j.is_object()) return reply_error(res, 400, "invalid JSON");
        Subscription sub;
        sub.entity_id_pattern = j.value("entityIdPattern", std::string{});
        sub.notify_url = j.value("notifyUrl", std::string{});
        if (j.contains("watchedAttrs") && j["watchedAttrs"].is_array()) {
            for (const auto& w : j["watchedAttrs"]) {
                if (w.is_string()) sub.watched_attrs.push_back(w.get<std::string>());
            }
        }
        auto id = store_.create_subscription(std::move(sub));
        if (!id) return reply_error(res, 400, to_string(id.error()));
        res.set_header("Location", "/v2/subscriptions/" + id.value());
        reply_json(res, 201, Json{{"id", id.value()}});
    });
}

Result<void, std::string> BrokerService::start() {
    if (thread_.joinable()) return std::string("already running");
    install_routes();
    if (cfg_.port == 0) {
        port_ = svr_->bind_to_any_port(cfg_.bind);
        if (port_ < 0) return std::string("bind failed on " + cfg_.bind);
    } else {
        if (!svr_->bind_to_port(cfg_.bind, cfg_.port)) {
            return std::string("bind failed on " + cfg_.bind + ":" + std::to_string(cfg_.port));
        }
        port_ = cfg_.port;
    }
    thread_ = std::thread([this] { svr_->listen_after_bind(); });
    svr_->wait_until_ready();
    return {};
}

void BrokerService::stop() {
    if (!thread_.joinable()) return;
    svr_->stop();
    thread_.join();
}

}  // namespace flexgate::broker
