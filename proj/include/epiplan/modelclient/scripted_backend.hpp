#pragma once

#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

#include "epiplan/common/json.hpp"
#include "epiplan/modelclient/backend.hpp"

namespace epiplan::model {

// Plays back replies in order, whatever the request.
class ScriptedBackend : public ModelBackend {
public:
    explicit ScriptedBackend(std::vector<std::string> replies) : replies_(std::move(replies)) {}

    // Accepts either a JSON array of strings or {"replies": [...]}.
    static ScriptedBackend from_file(const std::filesystem::path& path);

    std::string id() const override { return "scripted"; }
    std::string generate(const ModelRequest& request) override;

    std::size_t remaining() const;

private:
    mutable std::mutex mu_;
    std::vector<std::string> replies_;
    std::size_t next_ = 0;
};

// Forwards to another backend and keeps every reply so a run can be
// replayed through ScriptedBackend.
class RecordingBackend : public ModelBackend {
public:
    explicit RecordingBackend(ModelBackend& inner) : inner_(inner) {}

    std::string id() const override { return inner_.id(); }
    std::string generate(const ModelRequest& request) override;

    std::vector<std::string> replies() const;
    Json transcript() const;

private:
    ModelBackend& inner_;
    mutable std::mutex mu_;
    std::vector<std::string> replies_;
};

}  // namespace epiplan::model
