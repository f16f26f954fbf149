#pragma once

#include <memory>
#include <string>

#include "epiplan/service/session_service.hpp"

namespace epiplan::service {

struct HttpOptions {
    std::string token;  // bearer token required on every route but /healthz; empty disables auth
    std::string ui_dir;  // static files served under /ui when set
};

// JSON routes over a SessionService:
//   POST /sessions                 GET /sessions           GET /sessions/{id}
//   POST /sessions/{id}/rounds     POST /sessions/{id}/feedback
//   POST /sessions/{id}/close      GET /kb/diseases        GET /kb/{disease}/actions
//   GET /healthz
// Errors are {"error": {"code", "message"}} with a code from error_codes().
class HttpServer {
public:
    HttpServer(SessionService& service, HttpOptions options = {});
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    // Binds to `port` (0 picks a free one) and returns the bound port.
    // Throws std::runtime_error when binding fails.
    int bind(const std::string& host, int port);
    // Serves until stop(); call after bind().
    void listen();
    void stop();
    void wait_until_ready() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace epiplan::service
