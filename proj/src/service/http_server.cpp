#include "epiplan/service/http_server.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

namespace epiplan::service {

namespace {

constexpr const char* kJson = "application/json";

void send(httplib::Response& res, int status, const Json& body) {
    res.status = status;
    res.set_content(body.dump(), kJson);
}

void send_error(httplib::Response& res, const ApiError& e) { send(res, e.status(), e.body()); }

Json parse_body(const httplib::Request& req) {
    if (req.body.empty()) throw ApiError("invalid_request", "request body is empty");
    Json j = Json::parse(req.body, nullptr, false);
    if (j.is_discarded()) throw ApiError("invalid_request", "request body is not valid JSON");
    if (!j.is_object()) throw ApiError("invalid_request", "request body must be a JSON object");
    return j;
}

}  // namespace

struct HttpServer::Impl {
    SessionService& service;
    HttpOptions options;
    httplib::Server server;

    // Wraps a handler so every failure becomes a documented error response.
    template <typename F>
    httplib::Server::Handler handle(F f) {
        return [f = std::move(f)](const httplib::Request& req, httplib::Response& res) {
            try {
                f(req, res);
            } catch (...) {
                auto e = to_api_error(std::current_exception());
                if (e.status() >= 500) spdlog::error("{} {}: {}", req.method, req.path, e.what());
                send_error(res, e);
            }
        };
    }

    Impl(SessionService& s, HttpOptions o) : service(s), options(std::move(o)) {
        server.set_pre_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
            if (options.token.empty() || req.path == "/healthz" || req.path.rfind("/ui", 0) == 0)
                return httplib::Server::HandlerResponse::Unhandled;
            if (req.get_header_value("Authorization") == "Bearer " + options.token)
                return httplib::Server::HandlerResponse::Unhandled;
            send_error(res, ApiError("unauthorized", "missing or wrong bearer token"));
            return httplib::Server::HandlerResponse::Handled;
        });
        server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
            if (!res.body.empty()) return;
            if (res.status == 404) {
                send_error(res, ApiError("not_found", "no route for " + req.method + " " + req.path));
            } else if (res.status >= 400 && res.status < 500) {
                send_error(res, ApiError("invalid_request", "malformed request"));
            } else {
                send_error(res, ApiError("internal", "request failed"));
            }
        });

        server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
            send(res, 200, Json{{"status", "ok"}});
        });
        server.Post("/sessions", handle([this](const httplib::Request& req, httplib::Response& res) {
            auto body = service.create_session(parse_body(req));
            res.set_header("Location", "/sessions/" + body["id"].get<std::string>());
            send(res, 201, body);
        }));
        server.Get("/sessions", handle([this](const httplib::Request&, httplib::Response& res) {
            send(res, 200, service.list_sessions());
        }));
        server.Get("/sessions/([^/]+)", handle([this](const httplib::Request& req, httplib::Response& res) {
            send(res, 200, service.get_session(req.matches[1]));
        }));
        server.Post("/sessions/([^/]+)/rounds", handle([this](const httplib::Request& req, httplib::Response& res) {
            send(res, 201, service.generate_round(req.matches[1]));
        }));
        server.Post("/sessions/([^/]+)/feedback", handle([this](const httplib::Request& req, httplib::Response& res) {
            send(res, 200, service.post_feedback(req.matches[1], parse_body(req)));
        }));
        server.Post("/sessions/([^/]+)/close", handle([this](const httplib::Request& req, httplib::Response& res) {
            send(res, 200, service.close_session(req.matches[1]));
        }));
        server.Get("/kb/diseases", handle([this](const httplib::Request&, httplib::Response& res) {
            send(res, 200, service.kb_diseases());
        }));
        server.Get("/kb/([^/]+)/actions", handle([this](const httplib::Request& req, httplib::Response& res) {
            send(res, 200, service.kb_actions(req.matches[1].str()));
        }));
        if (!options.ui_dir.empty() && !server.set_mount_point("/ui", options.ui_dir))
            throw std::runtime_error("cannot serve UI from " + options.ui_dir);
    }
};

HttpServer::HttpServer(SessionService& service, HttpOptions options)
    : impl_(std::make_unique<Impl>(service, std::move(options))) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    if (port == 0) {
        int bound = impl_->server.bind_to_any_port(host);
        if (bound < 0) throw std::runtime_error("cannot bind " + host);
        return bound;
    }
    if (!impl_->server.bind_to_port(host, port))
        throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
    return port;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
    if (impl_) impl_->server.stop();
}

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace epiplan::service
