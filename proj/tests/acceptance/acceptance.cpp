// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failures. Usage: acceptance [path/to/epiplan]

#include <sys/wait.h>
#include <unistd.h>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "epiplan/condlang/condition.hpp"
#include "epiplan/evalharness/benchmark.hpp"
#include "epiplan/evalharness/metrics.hpp"
#include "epiplan/flowgraph/executor.hpp"
#include "epiplan/knowledge/knowledge_base.hpp"
#include "epiplan/modelclient/rule_based_mock.hpp"
#include "epiplan/modelclient/scripted_backend.hpp"
#include "epiplan/pipeline/planner.hpp"
#include "epiplan/service/http_server.hpp"
#include "epiplan/service/journal.hpp"
#include "epiplan/service/session_service.hpp"
#include "support/cond_oracle.hpp"
#include "support/dengue_tables.hpp"
#include "support/fact_oracle.hpp"
#include "support/plan_oracle.hpp"
#include "support/random_dag.hpp"
#include "support/service_script.hpp"
#include "support/stats_oracle.hpp"
#include "support/temp_dir.hpp"

using namespace epiplan;

namespace {

const std::filesystem::path kFixtures(EPIPLAN_FIXTURES_DIR);

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Env {
    kb::KnowledgeBase kb = kb::load_knowledge_base(kFixtures / "kb");
    std::vector<model::Scenario> scenarios = model::load_scenarios(kFixtures / "scenarios");

    const model::Scenario& scenario(const std::string& id) const {
        for (const auto& s : scenarios)
            if (s.id == id) return s;
        throw std::runtime_error("no scenario " + id);
    }
};

Env& env() {
    static Env e;
    return e;
}

std::string fixed_time() { return "2025-07-27T00:00:00.000Z"; }

pipeline::PlanningSession two_rounds(const model::Scenario& s, model::ModelBackend& backend) {
    pipeline::PlannerOptions options;
    options.clock = fixed_time;
    pipeline::Planner planner(env().kb, backend, options);
    auto session = planner.create_session(s.id, pipeline::report_from_scenario(s));
    planner.advance_session(session, std::nullopt);
    planner.advance_session(session,
                            pipeline::scenario_feedback(s.feedback_rounds.at(0), session.rounds.back().tasks));
    return session;
}

bool row_matches(const pipeline::TaskItem& item, const testing::TableRow& row) {
    return item.action == row.action && item.work_requirement == row.work_requirement &&
           item.responsible_party == row.responsible_party && item.time_limit == row.time_limit;
}

Outcome golden_dengue() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto& s = env().scenario("dengue-fever-1");
    std::vector<std::string> dumps;
    std::string problem;
    for (int run = 0; run < 3; ++run) {
        model::RuleBasedMock mock(env().scenarios);
        auto session = two_rounds(s, mock);
        dumps.push_back(to_json(session).dump());
        const auto& r1 = session.rounds.at(0).tasks.items;
        const auto& r2 = session.rounds.at(1).tasks.items;
        if (r1.size() != testing::kDengueRound1Size) problem = "round 1 has " + std::to_string(r1.size()) + " items";
        for (const auto& row : testing::kDengueRound1Excerpt) {
            bool found = false;
            for (const auto& item : r1) found = found || row_matches(item, row);
            if (!found) problem = "round 1 lacks the row for " + std::string(row.action);
        }
        if (r2.size() != testing::kDengueRound2.size()) {
            problem = "round 2 has " + std::to_string(r2.size()) + " items";
        } else {
            for (std::size_t i = 0; i < r2.size(); ++i)
                if (!row_matches(r2[i], testing::kDengueRound2[i])) problem = "round 2 row " + std::to_string(i) + " differs";
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool stable = dumps[0] == dumps[1] && dumps[1] == dumps[2];
    if (!stable) problem = "runs differ";
    if (secs >= 5.0) problem = "took " + std::to_string(secs) + " s";
    std::ostringstream os;
    os << "13 + 5 rows matched, 3 runs byte-identical, " << secs << " s";
    return {problem.empty(), problem.empty() ? os.str() : problem};
}

// A task is grounded when some record of the disease has its action and
// work requirement and names its party for the report's risk level.
bool grounded(const pipeline::TaskItem& item, const std::vector<kb::ResponseAction>& plans, kb::RiskLevel level) {
    const bool ab = level == kb::RiskLevel::A || level == kb::RiskLevel::B;
    for (const auto& p : plans) {
        if (text::canonical(p.action) != text::canonical(item.action)) continue;
        if (text::canonical(p.work_requirement) != text::canonical(item.work_requirement)) continue;
        if (text::canonical(ab ? p.responsible_ab : p.responsible_cd) == text::canonical(item.responsible_party))
            return true;
    }
    return false;
}

Outcome grounding_closure() {
    std::size_t tasks = 0, flagged = 0, ungrounded = 0, wrong_disease = 0;
    for (const auto& s : env().scenarios) {
        model::RuleBasedMock mock(env().scenarios);
        auto session = two_rounds(s, mock);
        if (session.disease != s.disease) ++wrong_disease;
        const auto& plans = kb::retrieve_candidate_plans(env().kb, s.disease);
        for (const auto& round : session.rounds) {
            const auto& g = round.tasks.grounding;
            flagged += g.count(pipeline::GroundingFlag::Hallucinated) + g.count(pipeline::GroundingFlag::PartyMismatch);
            for (const auto& item : round.tasks.items) {
                ++tasks;
                if (!grounded(item, plans, s.risk_level)) ++ungrounded;
            }
        }
    }
    std::ostringstream os;
    os << env().scenarios.size() << " scenarios, " << tasks << " tasks: " << flagged << " Hallucinated/PartyMismatch flags, "
       << ungrounded << " without a matching record, " << wrong_disease << " misidentified";
    return {env().scenarios.size() == 16 && flagged == 0 && ungrounded == 0 && wrong_disease == 0, os.str()};
}

Outcome trigger_soundness() {
    std::size_t equal = 0;
    std::string first_miss;
    for (const auto& s : env().scenarios) {
        model::RuleBasedMock mock(env().scenarios);
        auto session = two_rounds(s, mock);
        const auto& plans = kb::retrieve_candidate_plans(env().kb, s.disease);
        std::vector<std::pair<std::string, cond::Truth>> structured;
        for (const auto& p : kb::extract_condition_points(plans))
            structured.emplace_back(p, testing::oracle_verdict(p, s, {}));
        std::set<testing::ActionKey> want, got;
        for (auto i : testing::oracle_select(plans, structured))
            want.insert(testing::action_key(plans[i].action, plans[i].work_requirement));
        for (const auto& item : session.rounds.at(0).tasks.items)
            got.insert(testing::action_key(item.action, item.work_requirement));
        if (want == got) {
            ++equal;
        } else if (first_miss.empty()) {
            first_miss = s.id;
        }
    }
    std::string detail = std::to_string(equal) + "/" + std::to_string(env().scenarios.size()) + " exact set equality";
    if (!first_miss.empty()) detail += "; first mismatch " + first_miss;
    return {equal == 16 && env().scenarios.size() == 16, detail};
}

Outcome condlang_oracle() {
    const std::vector<std::string> vocab = {"a", "b", "c", "d"};
    const cond::Truth vals[3] = {cond::Truth::No, cond::Truth::Yes, cond::Truth::Unknown};
    testing::ExprGenerator gen(20250727);
    std::size_t checks = 0, agree = 0;
    const int expressions = 250;
    for (int n = 0; n < expressions; ++n) {
        const auto e = gen.tree(vocab, 3);
        for (int code = 0; code < 81; ++code) {
            std::vector<cond::Truth> v;
            cond::TruthAssignment m;
            int k = code;
            for (const auto& a : vocab) {
                v.push_back(vals[k % 3]);
                m[a] = vals[k % 3];
                k /= 3;
            }
            ++checks;
            if (cond::evaluate_condition(e, m) == testing::oracle_evaluate(e, vocab, v)) ++agree;
        }
    }
    std::ostringstream os;
    os << expressions << " expressions x 81 assignments: " << agree << "/" << checks << " agree";
    return {agree == checks, os.str()};
}

Outcome scheduler_properties() {
    std::mt19937 rng(500);
    std::size_t graphs = 0, mismatched = 0, order_violations = 0, over_bound = 0, max_nodes = 0;
    for (int trial = 0; trial < 500; ++trial) {
        testing::Instrumentation inst;
        inst.sleep = trial % 25 == 0;
        auto dag = testing::make_random_dag(rng, inst, 30);
        max_nodes = std::max(max_nodes, dag.graph.nodes.size());
        ++graphs;
        std::optional<Json> reference;
        for (std::size_t p : {1u, 2u, 8u}) {
            inst.peak = 0;
            flow::Budget b;
            b.max_parallel = p;
            auto res = flow::execute(dag.graph, {{"x", dag.input_value}}, dag.registry, b);
            if (!testing::check_against_oracle(dag, res).empty()) ++order_violations;
            if (inst.peak.load() > static_cast<int>(p)) ++over_bound;
            auto outputs = res.trace.to_json(false);
            if (!reference) {
                reference = outputs;
            } else if (outputs != *reference) {
                ++mismatched;
            }
        }
    }
    std::ostringstream os;
    os << graphs << " DAGs (<= " << max_nodes << " nodes) at parallelism 1/2/8: " << mismatched
       << " output mismatches, " << order_violations << " oracle/order violations, " << over_bound
       << " bound overruns";
    return {graphs == 500 && max_nodes <= 30 && mismatched == 0 && order_violations == 0 && over_bound == 0, os.str()};
}

Outcome metric_oracles() {
    std::mt19937_64 rng(20);
    std::normal_distribution<double> dist(50.0, 15.0);
    std::uniform_real_distribution<double> scale(0.1, 10.0), shift(-100.0, 100.0);
    double worst_oracle = 0, worst_affine = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> x(20), y(20);
        for (std::size_t i = 0; i < 20; ++i) {
            x[i] = dist(rng);
            y[i] = 0.3 * x[i] + dist(rng);
        }
        const double r = eval::pearson_r(x, y).r;
        worst_oracle = std::max(worst_oracle, std::abs(r - testing::two_pass_pearson(x, y)));
        const double a = scale(rng), b = shift(rng);
        for (auto& v : y) v = a * v + b;
        worst_affine = std::max(worst_affine, std::abs(eval::pearson_r(x, y).r - r));
    }

    std::size_t cases = 0, exact = 0;
    for (std::size_t n = 1; n <= 6; ++n) {
        eval::GoldChecklist c;
        c.scenario_id = "s";
        c.disease = "d";
        for (std::size_t i = 0; i < n; ++i) c.required_actions.push_back("action " + std::to_string(i));
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
            std::vector<pipeline::TaskItem> items = {{"unrelated", "w", "p", "1 day"}};
            std::size_t k = 0;
            for (std::size_t i = 0; i < n; ++i)
                if (mask & (1u << i)) {
                    items.push_back({c.required_actions[i], "w", "p", "1 day"});
                    ++k;
                }
            ++cases;
            if (eval::completeness_score(items, c).completeness == 100.0 * static_cast<double>(k) / static_cast<double>(n))
                ++exact;
        }
    }
    std::ostringstream os;
    os << "pearson max |r - oracle| " << worst_oracle << " over 1000 vectors (n=20), max affine |dr| " << worst_affine
       << ", completeness exact " << exact << "/" << cases;
    return {worst_oracle < 1e-12 && worst_affine < 1e-9 && exact == cases, os.str()};
}

Outcome kb_validation() {
    const auto clean = kb::scan_knowledge_base(kFixtures / "kb");
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(kFixtures / "kb"))
        if (e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());

    const std::set<std::string> required = {"Action", "Trigger Condition", "Work Requirement", "Work Requirements",
                                            "Time Limit"};
    std::mt19937 rng(100);
    std::size_t correct = 0;
    std::string first_wrong;
    for (int trial = 0; trial < 100; ++trial) {
        testing::TempDir dir;
        for (const auto& f : files) std::filesystem::copy_file(f, dir.path() / f.filename());
        const auto& target = files[rng() % files.size()];
        Json doc = Json::parse(testing::read_file(target));
        Json& records = doc.is_array() ? doc : doc["actions"];
        const std::size_t idx = rng() % records.size();
        std::vector<std::string> keys;
        for (const auto& [k, _] : records[idx].items()) keys.push_back(k);
        const auto key = keys[rng() % keys.size()];

        std::string want_field = key, want_rule;
        switch (rng() % 3) {
            case 0:
                records[idx].erase(key);
                want_rule = "missing";
                if (key == "Work Requirements") want_field = "Work Requirement";
                // An optional field may be absent; blank a required one instead.
                if (!required.contains(key)) {
                    records[idx][key] = nullptr;
                    want_rule = "not-string";
                }
                break;
            case 1:
                records[idx][key] = 42;
                want_rule = "not-string";
                break;
            default:
                if (required.contains(key)) {
                    records[idx][key] = " ";
                    want_rule = "empty";
                } else {
                    records[idx][key] = Json::array();
                    want_rule = "not-string";
                }
        }
        testing::write_file(dir.path() / target.filename(), doc.dump(2));

        const auto scan = kb::scan_knowledge_base(dir.path());
        const bool ok = scan.violations.size() == 1 && scan.violations[0].file == target.filename().string() &&
                        scan.violations[0].index == std::optional<std::size_t>(idx) &&
                        scan.violations[0].field == want_field && scan.violations[0].rule == want_rule;
        if (ok) {
            ++correct;
        } else if (first_wrong.empty()) {
            first_wrong = target.filename().string() + "[" + std::to_string(idx) + "]." + key;
        }
    }
    std::string detail = "clean fixtures: " + std::to_string(clean.violations.size()) + " violations; " +
                         std::to_string(correct) + "/100 corruptions reported once and attributed correctly";
    if (!first_wrong.empty()) detail += "; first miss " + first_wrong;
    return {clean.violations.empty() && correct == 100, detail};
}

// GET every session over HTTP from a server backed by `journal`.
std::string http_snapshot(const std::filesystem::path& journal, model::ModelBackend& backend) {
    service::ServiceOptions options;
    options.clock = fixed_time;
    options.planner.clock = fixed_time;
    service::SessionService svc(env().kb, backend, std::make_unique<service::FileJournal>(journal), options);
    service::HttpServer server(svc);
    const int port = server.bind("127.0.0.1", 0);
    std::thread t([&] { server.listen(); });
    server.wait_until_ready();
    httplib::Client c("127.0.0.1", port);
    std::string out;
    auto listing = c.Get("/sessions");
    if (listing) {
        out = listing->body;
        for (const auto& s : Json::parse(listing->body)) {
            auto res = c.Get("/sessions/" + s["id"].get<std::string>());
            out += "\n" + (res ? std::to_string(res->status) + " " + res->body : std::string("no response"));
        }
    } else {
        out = "no response";
    }
    server.stop();
    t.join();
    return out;
}

Outcome durability() {
    std::vector<const model::Scenario*> scenarios;
    for (const auto* id : {"dengue-fever-1", "cholera-1", "influenza-2", "pertussis-1", "monkeypox-2"})
        scenarios.push_back(&env().scenario(id));
    const auto script = testing::interleaved_script(scenarios.size());
    model::RuleBasedMock mock(env().scenarios);
    testing::TempDir dir;

    // Reference: what GET returned after each event of an uninterrupted run.
    std::vector<std::string> expected;
    {
        const auto path = dir.path() / "reference.jsonl";
        for (std::size_t k = 1; k <= script.size(); ++k) {
            std::filesystem::remove(path);
            {
                service::ServiceOptions options;
                options.clock = fixed_time;
                options.planner.clock = fixed_time;
                service::SessionService svc(env().kb, mock, std::make_unique<service::FileJournal>(path), options);
                for (std::size_t i = 0; i < k; ++i) testing::run_step(svc, script[i], scenarios);
            }
            expected.push_back(http_snapshot(path, mock));
        }
    }

    // Kill a writer process with SIGKILL right after event k, then restart.
    std::size_t cuts = 0, identical = 0;
    std::string first_bad;
    for (std::size_t k = 1; k < script.size(); ++k) {
        const auto path = dir.path() / ("cut-" + std::to_string(k) + ".jsonl");
        std::fflush(nullptr);
        const pid_t pid = fork();
        if (pid == 0) {
            service::ServiceOptions options;
            options.clock = fixed_time;
            options.planner.clock = fixed_time;
            service::SessionService svc(env().kb, mock, std::make_unique<service::FileJournal>(path), options);
            for (std::size_t i = 0; i < k; ++i) testing::run_step(svc, script[i], scenarios);
            ::kill(::getpid(), SIGKILL);
            ::_exit(0);
        }
        int status = 0;
        ::waitpid(pid, &status, 0);
        ++cuts;
        const bool killed = WIFSIGNALED(status) && WTERMSIG(status) == SIGKILL;
        model::ScriptedBackend no_model({});
        if (killed && http_snapshot(path, no_model) == expected[k - 1]) {
            ++identical;
        } else if (first_bad.empty()) {
            first_bad = std::to_string(k);
        }
    }
    std::string detail = std::to_string(identical) + "/" + std::to_string(cuts) +
                         " cut points replay to the pre-kill GET bodies byte for byte (" +
                         std::to_string(script.size()) + "-event script, 5 sessions)";
    if (!first_bad.empty()) detail += "; first bad cut " + first_bad;
    return {cuts >= 20 && identical == cuts, detail};
}

Outcome mock_latency(const std::string& cli) {
    if (cli.empty()) return {false, "no epiplan binary given"};
    testing::TempDir dir;
    const auto report = dir.path() / "bench.json";
    const std::string cmd = "\"" + cli + "\" bench --log-level error --kb \"" + (kFixtures / "kb").string() +
                            "\" --scenarios \"" + (kFixtures / "scenarios").string() + "\" --backend mock --out \"" +
                            report.string() + "\" > /dev/null";
    const int rc = std::system(cmd.c_str());
    if (rc != 0) return {false, "epiplan bench exited with " + std::to_string(rc)};
    const Json j = Json::parse(testing::read_file(report));
    const double slowest = j.at("latency").at("slowest_round_ms").get<double>();
    const std::size_t rows = j.at("rows").size();
    std::ostringstream os;
    os << "epiplan bench: " << rows << " scenarios x 2 rounds, slowest round " << slowest << " ms (round 1 mean "
       << j["latency"]["round1_mean_ms"].get<double>() << " ms)";
    return {rows == 16 && slowest < 1000.0, os.str()};
}

}  // namespace

int main(int argc, char** argv) {
    spdlog::set_level(spdlog::level::err);
    const std::string cli = argc > 1 ? argv[1] : "";

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"golden dengue round trip", golden_dengue},
        {"grounding closure", grounding_closure},
        {"trigger soundness", trigger_soundness},
        {"condition oracle equivalence", condlang_oracle},
        {"scheduler properties", scheduler_properties},
        {"metric oracles", metric_oracles},
        {"knowledge base validation", kb_validation},
        {"durability", durability},
        {"mock-mode latency", [&] { return mock_latency(cli); }},
    };

    int failures = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        if (!o.pass) ++failures;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  " << name << ": " << o.detail << std::endl;
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failures)) << "/" << criteria.size()
              << " acceptance criteria passed" << std::endl;
    return failures;
}
