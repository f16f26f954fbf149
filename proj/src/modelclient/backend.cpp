#include "epiplan/modelclient/backend.hpp"

#include <chrono>

namespace epiplan::model {

ModelRequest make_request(const PromptTemplate& tmpl, Bindings bindings, Decoding decoding) {
    ModelRequest r;
    r.template_name = tmpl.name;
    r.template_id = template_from_string(tmpl.name);
    r.prompt = render_prompt(tmpl, bindings);
    r.bindings = std::move(bindings);
    r.decoding = decoding;
    return r;
}

ModelRequest make_request(TemplateId id, Bindings bindings, Decoding decoding) {
    return make_request(builtin_template(id), std::move(bindings), decoding);
}

ModelResponse complete(ModelBackend& backend, const ModelRequest& request) {
    auto t0 = std::chrono::steady_clock::now();
    ModelResponse r;
    r.text = backend.generate(request);
    r.backend = backend.id();
    r.latency_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

}  // namespace epiplan::model
