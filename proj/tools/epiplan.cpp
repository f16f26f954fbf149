#include <csignal>
#include <iostream>
#include <map>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "cli_support.hpp"
#include "epiplan/evalharness/benchmark.hpp"
#include "epiplan/flowgraph/validate.hpp"
#include "epiplan/knowledge/knowledge_base.hpp"
#include "epiplan/modelclient/rule_based_mock.hpp"
#include "epiplan/pipeline/planner.hpp"
#include "epiplan/pipeline/workflow.hpp"
#include "epiplan/service/http_server.hpp"
#include "epiplan/service/journal.hpp"
#include "epiplan/service/session_service.hpp"

using namespace epiplan;

namespace {

std::pair<std::string, int> split_addr(const std::string& addr) {
    const auto colon = addr.rfind(':');
    if (colon == std::string::npos) throw std::runtime_error("--addr must be host:port, got " + addr);
    return {addr.substr(0, colon), std::stoi(addr.substr(colon + 1))};
}

struct ServeArgs {
    std::string kb = "fixtures/kb";
    cli::BackendFlags backend;
    std::string journal = "epiplan-journal.jsonl";
    std::string addr = "127.0.0.1:8080";
    std::string token;
    std::string ui_dir;
};

int serve(const ServeArgs& args) {
    const auto kb = kb::load_knowledge_base(args.kb);
    auto backend = cli::make_backend(args.backend);
    service::SessionService svc(kb, *backend.model, std::make_unique<service::FileJournal>(args.journal));
    service::HttpServer server(svc, service::HttpOptions{args.token, args.ui_dir});

    // Handle SIGINT/SIGTERM on a thread of our own rather than in a handler.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    const auto [host, port] = split_addr(args.addr);
    const int bound = server.bind(host, port);
    std::thread waiter([&] {
        int sig = 0;
        sigwait(&signals, &sig);
        spdlog::info("signal {}: shutting down", sig);
        server.stop();
    });
    waiter.detach();
    spdlog::info("serving {} disease(s) with backend {} on {}:{} (journal {}, {} session(s) restored)", kb.size(),
                 backend.model->id(), host, bound, args.journal, svc.session_count());
    if (args.token.empty()) spdlog::warn("no --token given: the API is open to anyone who can reach it");
    server.listen();
    return 0;
}

struct PlanArgs {
    std::string report;
    std::string kb = "fixtures/kb";
    cli::BackendFlags backend;
    int rounds = 1;
    std::vector<std::string> feedback;
    std::string out;
};

int plan(const PlanArgs& args) {
    const auto kb = kb::load_knowledge_base(args.kb);
    auto input = cli::read_report(args.report);
    auto backend = cli::make_backend(args.backend);
    if (input.scenario && args.backend.kind == "mock") {
        // Let the mock answer from the scenario it was handed.
        backend.scenarios.push_back(*input.scenario);
        backend.model = std::make_unique<model::RuleBasedMock>(backend.scenarios);
    }

    pipeline::Planner planner(kb, *backend.model);
    auto session = planner.create_session("plan", input.report);
    for (int r = 1; r <= args.rounds; ++r) {
        std::optional<pipeline::Feedback> feedback;
        if (r > 1) {
            const auto& previous = session.rounds.back().tasks;
            const auto i = static_cast<std::size_t>(r - 2);
            if (i < args.feedback.size()) {
                feedback = cli::read_feedback(args.feedback[i], previous);
            } else if (input.scenario && i < input.scenario->feedback_rounds.size()) {
                feedback = pipeline::scenario_feedback(input.scenario->feedback_rounds[i], previous);
            } else {
                throw std::runtime_error("round " + std::to_string(r) + " needs a --feedback file for round " +
                                         std::to_string(r - 1));
            }
        }
        planner.advance_session(session, feedback);
        const auto& list = session.rounds.back().tasks;
        if (!list.grounding.clean())
            spdlog::warn("round {}: {} item(s) not grounded cleanly in the knowledge base", r,
                         list.grounding.count(pipeline::GroundingFlag::Hallucinated) +
                             list.grounding.count(pipeline::GroundingFlag::PartyMismatch) +
                             list.grounding.count(pipeline::GroundingFlag::TimeLimitMismatch));
        std::cout << to_json(list).dump(2) << "\n";
    }
    if (!args.out.empty()) cli::write_text_file(args.out, to_json(session).dump(2) + "\n");
    return 0;
}

int validate_kb(const std::string& dir) {
    const auto scan = kb::scan_knowledge_base(dir);
    for (const auto& w : scan.warnings) std::cerr << "warning: " << w << "\n";
    for (const auto& v : scan.violations) std::cout << v.describe() << "\n";
    std::size_t actions = 0;
    for (const auto& [key, d] : scan.kb.entries()) actions += d.actions.size();
    std::cerr << scan.kb.size() << " disease(s), " << actions << " valid record(s), " << scan.violations.size()
              << " violation(s)\n";
    return scan.violations.empty() ? 0 : 1;
}

struct BenchArgs {
    std::string scenarios = "fixtures/scenarios";
    std::string kb = "fixtures/kb";
    cli::BackendFlags backend;
    std::string out = "bench-report.json";
    std::string csv;
    std::string ratings;
    std::size_t workers = 1;
};

int bench(BenchArgs args) {
    const auto kb = kb::load_knowledge_base(args.kb);
    // The mock needs the scenario facts; default to the benchmark's own set.
    if (args.backend.scenarios.empty()) args.backend.scenarios = args.scenarios;
    auto backend = cli::make_backend(args.backend);
    const auto scenarios = model::load_scenarios(args.scenarios);

    eval::BenchmarkOptions options;
    options.workers = std::max<std::size_t>(1, args.workers);
    const auto summary = eval::run_benchmark(scenarios, kb, *backend.model, options);
    auto report = eval::benchmark_report(summary, backend.model->id());

    double slowest = 0;
    for (const auto& row : summary.rows)
        if (!row.failed) slowest = std::max({slowest, row.r1.time_ms, row.r2.time_ms});
    report["latency"] = Json{{"round1_mean_ms", summary.overall.r1_time_ms.mean},
                             {"round2_mean_ms", summary.overall.r2_time_ms.mean},
                             {"slowest_round_ms", slowest}};

    if (!args.ratings.empty()) {
        std::map<std::string, double> ratings;
        for (const auto& [id, v] : cli::read_json_file(args.ratings).items()) ratings[id] = v.get<double>();
        const auto c = eval::rating_correlation(summary, ratings);
        report["rating_correlation"] = Json{{"r", c.r}, {"n", c.n}};
    }
    cli::write_text_file(args.out, report.dump(2) + "\n");
    if (!args.csv.empty()) {
        cli::write_text_file(args.csv + "-by-disease.csv", eval::disease_table_csv(summary));
        cli::write_text_file(args.csv + "-by-type.csv", eval::type_table_csv(summary));
    }

    std::cout << "scenarios: " << summary.rows.size() << " (" << summary.overall.failed << " failed)\n"
              << "completeness round 1: " << summary.overall.r1.mean << " +/- " << summary.overall.r1.sd << "\n"
              << "completeness round 2: " << summary.overall.r2.mean << " +/- " << summary.overall.r2.sd << "\n"
              << "latency per round: round 1 mean " << summary.overall.r1_time_ms.mean << " ms, round 2 mean "
              << summary.overall.r2_time_ms.mean << " ms, slowest " << slowest << " ms\n"
              << "report: " << args.out << "\n";
    return summary.overall.failed == 0 ? 0 : 1;
}

int workflow(const std::string& file) {
    if (file.empty()) {
        std::cout << to_json(pipeline::build_plan_workflow()).dump(2) << "\n";
        return 0;
    }
    const auto graph = flow::graph_from_json(cli::read_json_file(file));
    const auto violations = flow::validate_graph(graph);
    for (const auto& v : violations) std::cout << v.rule << " " << v.subject << ": " << v.detail << "\n";
    std::cerr << graph.nodes.size() << " node(s), " << violations.size() << " violation(s)\n";
    return violations.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Epidemic response planning: sessions, service and benchmarks"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string log_level = "info";
    app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")
        ->envname("EPIPLAN_LOG_LEVEL")
        ->capture_default_str();

    ServeArgs serve_args;
    auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
    serve_cmd->add_option("--kb", serve_args.kb, "Knowledge base directory")->envname("EPIPLAN_KB")->capture_default_str();
    cli::add_backend_flags(*serve_cmd, serve_args.backend);
    serve_cmd->add_option("--journal", serve_args.journal, "Session journal file")
        ->envname("EPIPLAN_JOURNAL")
        ->capture_default_str();
    serve_cmd->add_option("--addr", serve_args.addr, "host:port to listen on")
        ->envname("EPIPLAN_ADDR")
        ->capture_default_str();
    serve_cmd->add_option("--token", serve_args.token, "Bearer token clients must send")->envname("EPIPLAN_TOKEN");
    serve_cmd->add_option("--ui-dir", serve_args.ui_dir, "Static console files served under /ui")
        ->envname("EPIPLAN_UI_DIR");

    PlanArgs plan_args;
    auto* plan_cmd = app.add_subcommand("plan", "Generate task lists offline and print each round");
    plan_cmd->add_option("--report", plan_args.report, "Report or scenario JSON file")->required();
    plan_cmd->add_option("--kb", plan_args.kb, "Knowledge base directory")->envname("EPIPLAN_KB")->capture_default_str();
    cli::add_backend_flags(*plan_cmd, plan_args.backend);
    plan_cmd->add_option("--rounds", plan_args.rounds, "Rounds to generate")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    plan_cmd->add_option("--feedback", plan_args.feedback, "Feedback file for each round after the first");
    plan_cmd->add_option("--out", plan_args.out, "Also write the final session JSON here");

    std::string kb_dir;
    auto* validate_cmd = app.add_subcommand("validate-kb", "Check every knowledge-base record");
    validate_cmd->add_option("dir", kb_dir, "Knowledge base directory")->required();

    BenchArgs bench_args;
    auto* bench_cmd = app.add_subcommand("bench", "Score every scenario over two rounds");
    bench_cmd->add_option("--scenarios", bench_args.scenarios, "Scenario fixture directory")
        ->envname("EPIPLAN_SCENARIOS")
        ->capture_default_str();
    bench_cmd->add_option("--kb", bench_args.kb, "Knowledge base directory")->envname("EPIPLAN_KB")->capture_default_str();
    bench_cmd->add_option("--backend", bench_args.backend.kind, "Model backend: mock or http")
        ->envname("EPIPLAN_BACKEND")
        ->check(CLI::IsMember({"mock", "http"}))
        ->capture_default_str();
    bench_cmd->add_option("--model-config", bench_args.backend.config, "Remote model config file")
        ->envname("EPIPLAN_MODEL_CONFIG");
    bench_cmd->add_option("--model-endpoint", bench_args.backend.endpoint, "Chat-completions URL")
        ->envname("EPIPLAN_MODEL_ENDPOINT");
    bench_cmd->add_option("--model-token", bench_args.backend.token, "Model endpoint token")
        ->envname("EPIPLAN_MODEL_TOKEN");
    bench_cmd->add_option("--model-name", bench_args.backend.model, "Model name")->envname("EPIPLAN_MODEL");
    bench_cmd->add_option("--out", bench_args.out, "Report JSON file")->capture_default_str();
    bench_cmd->add_option("--csv", bench_args.csv, "Write <prefix>-by-disease.csv and <prefix>-by-type.csv");
    bench_cmd->add_option("--ratings", bench_args.ratings, "JSON {scenario id: expert rating} to correlate with");
    bench_cmd->add_option("--workers", bench_args.workers, "Scenarios run at once")->capture_default_str();

    std::string graph_file;
    auto* workflow_cmd = app.add_subcommand("workflow", "Print the planning workflow, or validate a graph file");
    workflow_cmd->add_option("--validate", graph_file, "Graph JSON file to validate");

    CLI11_PARSE(app, argc, argv);
    cli::init_logging(log_level);

    try {
        if (*serve_cmd) return serve(serve_args);
        if (*plan_cmd) return plan(plan_args);
        if (*validate_cmd) return validate_kb(kb_dir);
        if (*bench_cmd) return bench(bench_args);
        if (*workflow_cmd) return workflow(graph_file);
    } catch (const kb::KnowledgeBaseError& e) {
        for (const auto& v : e.violations()) std::cerr << v.describe() << "\n";
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
