#include "epiplan/modelclient/scripted_backend.hpp"

#include <fstream>

namespace epiplan::model {

ScriptedBackend ScriptedBackend::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open transcript " + path.string());
    Json doc = Json::parse(in);
    const Json& arr = doc.is_object() ? doc.at("replies") : doc;
    return ScriptedBackend(arr.get<std::vector<std::string>>());
}

std::string ScriptedBackend::generate(const ModelRequest&) {
    std::lock_guard lock(mu_);
    if (next_ >= replies_.size())
        throw BackendRefusal("scripted transcript exhausted after " + std::to_string(replies_.size()) + " replies");
    return replies_[next_++];
}

std::size_t ScriptedBackend::remaining() const {
    std::lock_guard lock(mu_);
    return replies_.size() - next_;
}

std::string RecordingBackend::generate(const ModelRequest& request) {
    auto text = inner_.generate(request);
    std::lock_guard lock(mu_);
    replies_.push_back(text);
    return text;
}

std::vector<std::string> RecordingBackend::replies() const {
    std::lock_guard lock(mu_);
    return replies_;
}

Json RecordingBackend::transcript() const {
    return Json{{"replies", replies()}};
}

}  // namespace epiplan::model
