#include "cli_support.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "epiplan/modelclient/http_backend.hpp"
#include "epiplan/modelclient/rule_based_mock.hpp"
#include "epiplan/pipeline/planner.hpp"

namespace epiplan::cli {

void add_backend_flags(CLI::App& cmd, BackendFlags& flags) {
    cmd.add_option("--backend", flags.kind, "Model backend: mock or http")
        ->envname("EPIPLAN_BACKEND")
        ->check(CLI::IsMember({"mock", "http"}))
        ->capture_default_str();
    cmd.add_option("--scenarios", flags.scenarios, "Scenario fixture directory the mock answers from")
        ->envname("EPIPLAN_SCENARIOS");
    cmd.add_option("--model-config", flags.config, "JSON file with endpoint, token, model, timeout_seconds")
        ->envname("EPIPLAN_MODEL_CONFIG");
    cmd.add_option("--model-endpoint", flags.endpoint, "Chat-completions URL")->envname("EPIPLAN_MODEL_ENDPOINT");
    cmd.add_option("--model-token", flags.token, "Bearer token for the model endpoint")->envname("EPIPLAN_MODEL_TOKEN");
    cmd.add_option("--model-name", flags.model, "Model name sent to the endpoint")->envname("EPIPLAN_MODEL");
    cmd.add_option("--model-timeout", flags.timeout_seconds, "Per-request timeout in seconds")
        ->envname("EPIPLAN_MODEL_TIMEOUT");
}

Backend make_backend(const BackendFlags& flags) {
    Backend b;
    if (!flags.scenarios.empty()) b.scenarios = model::load_scenarios(flags.scenarios);
    if (flags.kind == "mock") {
        b.model = std::make_unique<model::RuleBasedMock>(b.scenarios);
        return b;
    }
    if (flags.kind != "http") throw std::runtime_error("unknown backend " + flags.kind);

    model::HttpBackendConfig config;
    if (!flags.config.empty()) config = model::http_config_from_json(read_json_file(flags.config));
    if (!flags.endpoint.empty()) config.endpoint = flags.endpoint;
    if (!flags.token.empty()) config.token = flags.token;
    if (!flags.model.empty()) config.model = flags.model;
    if (flags.timeout_seconds > 0) config.timeout = std::chrono::seconds(flags.timeout_seconds);
    if (config.endpoint.empty()) throw std::runtime_error("the http backend needs --model-endpoint or a config file");
    if (config.model.empty()) throw std::runtime_error("the http backend needs --model-name or a config file");
    b.model = std::make_unique<model::HttpBackend>(std::move(config));
    return b;
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

ReportInput read_report(const std::filesystem::path& path) {
    const Json j = read_json_file(path);
    ReportInput in;
    if (j.is_object() && j.contains("report_text")) {
        in.report = pipeline::report_from_json(j);
    } else {
        in.scenario = model::scenario_from_json(j);
        in.report = pipeline::report_from_scenario(*in.scenario);
    }
    pipeline::validate(in.report);
    return in;
}

pipeline::Feedback read_feedback(const std::filesystem::path& path, const pipeline::TaskList& previous) {
    const Json j = read_json_file(path);
    if (j.is_object() && j.contains("default_status"))
        return pipeline::scenario_feedback(model::feedback_round_from_json(j), previous);
    return pipeline::feedback_from_json(j);
}

void init_logging(const std::string& level) {
    auto logger = spdlog::stderr_color_mt("epiplan");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::from_str(level));
}

}  // namespace epiplan::cli
