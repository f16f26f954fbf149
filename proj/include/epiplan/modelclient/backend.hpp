#pragma once

#include <memory>
#include <optional>
#include <string>

#include "epiplan/common/errors.hpp"
#include "epiplan/modelclient/prompts.hpp"

namespace epiplan::model {

struct Decoding {
    double temperature = 0.0;
    int max_tokens = 2048;
};

struct ModelRequest {
    std::string template_name;
    std::optional<TemplateId> template_id;  // empty for ad-hoc prompts
    Bindings bindings;
    std::string prompt;  // fully rendered
    Decoding decoding;
};

// Renders one of the built-in templates. Throws MissingBinding/UnknownPlaceholder.
ModelRequest make_request(TemplateId id, Bindings bindings, Decoding decoding = {});
ModelRequest make_request(const PromptTemplate& tmpl, Bindings bindings, Decoding decoding = {});

struct ModelResponse {
    std::string text;
    std::string backend;
    double latency_ms = 0;
};

class TransportError : public RetryableError {
public:
    using RetryableError::RetryableError;
};

// The backend answered but declined: non-2xx status, exhausted transcript,
// unsupported request.
class BackendRefusal : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ModelBackend {
public:
    virtual ~ModelBackend() = default;
    virtual std::string id() const = 0;
    // Must be safe to call from several threads at once.
    virtual std::string generate(const ModelRequest& request) = 0;
};

ModelResponse complete(ModelBackend& backend, const ModelRequest& request);

}  // namespace epiplan::model
