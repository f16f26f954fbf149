#include "epiplan/modelclient/http_backend.hpp"

#include <httplib.h>

#include <stdexcept>

namespace epiplan::model {

HttpBackendConfig http_config_from_json(const Json& j) {
    HttpBackendConfig c;
    if (j.contains("endpoint")) c.endpoint = j.at("endpoint").get<std::string>();
    if (j.contains("token")) c.token = j.at("token").get<std::string>();
    if (j.contains("model")) c.model = j.at("model").get<std::string>();
    if (j.contains("timeout_seconds")) c.timeout = std::chrono::seconds(j.at("timeout_seconds").get<int>());
    return c;
}

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
    const auto& url = config_.endpoint;
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw std::invalid_argument("endpoint must be an absolute URL: " + url);
    auto path_start = url.find('/', scheme_end + 3);
    base_ = url.substr(0, path_start);
    path_ = path_start == std::string::npos ? "/" : url.substr(path_start);
    if (config_.model.empty()) throw std::invalid_argument("model name is required for the HTTP backend");
}

std::string HttpBackend::generate(const ModelRequest& request) {
    httplib::Client client(base_);
    const auto t = config_.timeout;
    client.set_connection_timeout(t);
    client.set_read_timeout(t);
    client.set_write_timeout(t);

    Json body;
    body["model"] = config_.model;
    body["messages"] = Json::array({Json{{"role", "user"}, {"content", request.prompt}}});
    body["temperature"] = request.decoding.temperature;
    body["max_tokens"] = request.decoding.max_tokens;

    httplib::Headers headers;
    if (!config_.token.empty()) headers.emplace("Authorization", "Bearer " + config_.token);

    auto res = client.Post(path_, headers, body.dump(), "application/json");
    if (!res) throw TransportError("model endpoint unreachable: " + httplib::to_string(res.error()));
    if (res->status == 429 || res->status >= 500)
        throw TransportError("model endpoint returned HTTP " + std::to_string(res->status));
    if (res->status < 200 || res->status >= 300)
        throw BackendRefusal("model endpoint returned HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200));

    auto reply = Json::parse(res->body, nullptr, false);
    if (reply.is_discarded()) throw TransportError("model endpoint returned a non-JSON body");
    try {
        return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const Json::exception&) {
        throw BackendRefusal("model endpoint reply has no choices[0].message.content");
    }
}

}  // namespace epiplan::model
