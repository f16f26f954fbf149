#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "epiplan/common/json.hpp"
#include "epiplan/modelclient/backend.hpp"
#include "epiplan/modelclient/scenario.hpp"
#include "epiplan/pipeline/types.hpp"

namespace epiplan::cli {

// Which model to talk to. Every field can come from a flag or its
// environment variable; remote settings can also come from a JSON config
// file, which only fills what flags and environment leave empty.
struct BackendFlags {
    std::string kind = "mock";
    std::string scenarios;  // fixture directory whose facts the mock answers from
    std::string config;
    std::string endpoint;
    std::string token;
    std::string model;
    int timeout_seconds = 0;
};

void add_backend_flags(CLI::App& cmd, BackendFlags& flags);

struct Backend {
    std::vector<model::Scenario> scenarios;
    std::unique_ptr<model::ModelBackend> model;
};

// Throws std::runtime_error on an unknown kind or incomplete remote settings.
Backend make_backend(const BackendFlags& flags);

Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

// A report file is either an EpidemicReport ({report_text, risk_level, ...})
// or a scenario fixture, whose feedback rounds can then drive later rounds.
struct ReportInput {
    pipeline::EpidemicReport report;
    std::optional<model::Scenario> scenario;
};
ReportInput read_report(const std::filesystem::path& path);

// A feedback file is either Feedback JSON ({items: [{index, status, note}],
// new_facts}) or a fixture feedback round ({default_status, items, new_facts})
// resolved against the round it answers.
pipeline::Feedback read_feedback(const std::filesystem::path& path, const pipeline::TaskList& previous);

// Logs go to stderr so stdout stays machine-readable.
void init_logging(const std::string& level);

}  // namespace epiplan::cli
