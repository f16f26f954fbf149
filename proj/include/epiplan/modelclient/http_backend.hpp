#pragma once

#include <chrono>
#include <string>

#include "epiplan/common/json.hpp"
#include "epiplan/modelclient/backend.hpp"

namespace epiplan::model {

struct HttpBackendConfig {
    std::string endpoint;  // full URL of a chat-completions route
    std::string token;
    std::string model;
    std::chrono::seconds timeout{60};
};

// Reads {"endpoint", "token", "model", "timeout_seconds"}; absent keys keep defaults.
HttpBackendConfig http_config_from_json(const Json& j);

// OpenAI-style chat completions: POST {model, messages, temperature,
// max_tokens}, reply text taken from choices[0].message.content.
class HttpBackend : public ModelBackend {
public:
    explicit HttpBackend(HttpBackendConfig config);

    std::string id() const override { return "http:" + config_.model; }
    std::string generate(const ModelRequest& request) override;

private:
    HttpBackendConfig config_;
    std::string base_;  // scheme://host[:port]
    std::string path_;
};

}  // namespace epiplan::model
