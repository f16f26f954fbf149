#include <httplib.h>

#include <atomic>
#include <random>
#include <set>
#include <thread>

#include "doctest.h"
#include "epiplan/common/text.hpp"
#include "epiplan/knowledge/knowledge_base.hpp"
#include "epiplan/modelclient/backend.hpp"
#include "epiplan/modelclient/http_backend.hpp"
#include "epiplan/modelclient/json_extract.hpp"
#include "epiplan/modelclient/rule_based_mock.hpp"
#include "epiplan/modelclient/scenario.hpp"
#include "epiplan/modelclient/scripted_backend.hpp"
#include "epiplan/modelclient/text_lists.hpp"
#include "support/plan_oracle.hpp"

using namespace epiplan;
using namespace epiplan::model;

namespace {

const std::filesystem::path kFixtures(EPIPLAN_FIXTURES_DIR);

const std::vector<std::string> kDiseases = {"Influenza", "COVID-19", "Pertussis", "Dengue Fever",
                                            "Chikungunya Fever", "Cholera", "Monkeypox",
                                            "Hand-Foot-and-Mouth Disease"};

Json plans_json(const std::vector<kb::ResponseAction>& plans) {
    Json arr = Json::array();
    for (const auto& p : plans) arr.push_back(kb::to_json(p));
    return arr;
}

Json random_value(std::mt19937& rng, int depth) {
    const char alphabet[] = "abcXYZ 019{}[],:\"\\/-_.";
    auto random_string = [&] {
        std::string s;
        int n = static_cast<int>(rng() % 8);
        for (int i = 0; i < n; ++i) s.push_back(alphabet[rng() % (sizeof(alphabet) - 1)]);
        return s;
    };
    int kind = depth <= 0 ? static_cast<int>(rng() % 4) : static_cast<int>(rng() % 6);
    switch (kind) {
        case 0: return Json(static_cast<int>(rng() % 2001) - 1000);
        case 1: return Json(random_string());
        case 2: return Json(rng() % 2 == 0);
        case 3: return Json(nullptr);
        case 4: {
            Json arr = Json::array();
            int n = static_cast<int>(rng() % 4);
            for (int i = 0; i < n; ++i) arr.push_back(random_value(rng, depth - 1));
            return arr;
        }
        default: {
            Json obj = Json::object();
            int n = static_cast<int>(rng() % 4);
            for (int i = 0; i < n; ++i) obj[random_string()] = random_value(rng, depth - 1);
            return obj;
        }
    }
}

std::string random_prose(std::mt19937& rng) {
    const char* words[] = {"Here", "is", "the", "answer:", "plan", "```json", "```", "Sure!", "Note", "\n", "ok."};
    std::string s;
    int n = static_cast<int>(rng() % 6);
    for (int i = 0; i < n; ++i) {
        s += words[rng() % std::size(words)];
        s += ' ';
    }
    return s;
}

}  // namespace

TEST_CASE("built-in templates declare the expected placeholders") {
    using S = std::set<std::string>;
    CHECK(builtin_template(TemplateId::EpidemicTypeExtraction).placeholders ==
          S{"candidate_epidemic_types", "epidemic_reporting_information"});
    CHECK(builtin_template(TemplateId::ExtractConditionPoints).placeholders == S{"all_trigger_conditions"});
    CHECK(builtin_template(TemplateId::CaseStructuring).placeholders ==
          S{"condition_points", "epidemic_reporting_information"});
    CHECK(builtin_template(TemplateId::TaskListInitial).placeholders ==
          S{"risk_cases", "basic_case_information", "structured_info", "candidate_plans"});
    CHECK(builtin_template(TemplateId::TaskListIterative).placeholders ==
          S{"risk_cases", "basic_case_information", "structured_info", "candidate_plans", "previous_task_feedback"});
    for (auto id : all_templates()) {
        CHECK(template_from_string(to_string(id)) == id);
        CHECK(placeholders_in(builtin_template(id).body) == builtin_template(id).placeholders);
    }
}

TEST_CASE("prompt 1 renders both lists and ends with Answer:") {
    auto prompt = render_prompt(builtin_template(TemplateId::EpidemicTypeExtraction),
                                {{"candidate_epidemic_types", render_numbered_list(kDiseases)},
                                 {"epidemic_reporting_information", "A 6-year-old with paroxysmal cough; pertussis suspected."}});
    for (const auto& d : kDiseases) CHECK(prompt.find(d) != std::string::npos);
    CHECK(prompt.find("paroxysmal cough") != std::string::npos);
    CHECK(prompt.find("{\"Epidemic Type\": \"xxx\"}") != std::string::npos);
    CHECK(prompt.size() >= 7);
    CHECK(prompt.substr(prompt.size() - 7) == "Answer:");
}

TEST_CASE("template without placeholders renders verbatim") {
    auto t = PromptTemplate::make("plain", "No slots here, just {\"json\": 1}.");
    CHECK(t.placeholders.empty());
    CHECK(render_prompt(t, {}) == t.body);
}

TEST_CASE("binding errors") {
    Bindings b = {{"risk_cases", "x"}, {"basic_case_information", "x"}, {"structured_info", "x"}, {"candidate_plans", "x"}};
    CHECK_THROWS_AS(render_prompt(builtin_template(TemplateId::TaskListIterative), b), MissingBinding);
    try {
        render_prompt(builtin_template(TemplateId::TaskListIterative), b);
    } catch (const MissingBinding& e) {
        CHECK(e.name() == "previous_task_feedback");
    }
    b["bogus"] = "y";
    CHECK_THROWS_AS(render_prompt(builtin_template(TemplateId::TaskListInitial), b), UnknownPlaceholder);
}

TEST_CASE("substitution is single pass") {
    auto t = PromptTemplate::make("t", "A={a} B={b}");
    CHECK(render_prompt(t, {{"a", "{b}"}, {"b", "2"}}) == "A={b} B=2");
}

TEST_CASE("property: rendering is injective and leaves no markers") {
    std::mt19937 rng(7);
    const auto& t = builtin_template(TemplateId::TaskListIterative);
    std::set<std::string> seen_bindings, seen_renders;
    for (int i = 0; i < 300; ++i) {
        Bindings b;
        std::string key;
        for (const auto& name : t.placeholders) {
            std::string v;
            int n = static_cast<int>(rng() % 4);
            for (int k = 0; k < n; ++k) v.push_back("ab \n"[rng() % 4]);
            b[name] = v;
            key += v + '\x1f';
        }
        auto out = render_prompt(t, b);
        CHECK(placeholders_in(out).empty());
        if (seen_bindings.insert(key).second) CHECK(seen_renders.insert(out).second);
    }
}

TEST_CASE("extract_json_value examples") {
    auto v = extract_json_value(R"({"Epidemic Type": "Pertussis"})");
    CHECK(v["Epidemic Type"] == "Pertussis");
    auto arr = extract_json_value("Here is the plan:\n```json\n[{\"Action\":\"EPI\"}]\n```");
    REQUIRE(arr.is_array());
    CHECK(arr.size() == 1);
    CHECK(arr[0]["Action"] == "EPI");
    CHECK(extract_json_value("x {\"a\": [1, 2,], } y") == Json::parse(R"({"a":[1,2]})"));
    CHECK(extract_json_value("see [note] then {\"k\": \"}{\"}") == Json::parse(R"({"k":"}{"})"));
    CHECK(extract_json_value(R"(["a\"]", 1])") == Json::parse(R"(["a\"]", 1])"));
    CHECK_THROWS_AS(extract_json_value("no structured content here"), NoJsonFound);
    CHECK_THROWS_AS(extract_json_value("{\"unterminated\": "), NoJsonFound);
    try {
        extract_json_value("nothing");
    } catch (const RetryableError&) {
        CHECK(true);
    }
}

TEST_CASE("property: extraction recovers values wrapped in prose") {
    std::mt19937 rng(42);
    for (int i = 0; i < 500; ++i) {
        Json v = rng() % 2 ? Json::object() : Json::array();
        int n = static_cast<int>(rng() % 4);
        for (int k = 0; k < n; ++k) {
            if (v.is_array()) v.push_back(random_value(rng, 3));
            else v["k" + std::to_string(k)] = random_value(rng, 3);
        }
        std::string text = random_prose(rng) + v.dump(rng() % 2 ? 2 : -1) + " " + random_prose(rng);
        CAPTURE(text);
        CHECK(extract_json_value(text) == v);
    }
}

TEST_CASE("list helpers round trip") {
    std::vector<std::string> items = {"confirmed case", "suspected case"};
    CHECK(render_numbered_list(items) == "1. confirmed case\n2. suspected case");
    CHECK(parse_list_items("1. confirmed case\n\n2) suspected case\n- third\n* fourth") ==
          std::vector<std::string>{"confirmed case", "suspected case", "third", "fourth"});
    std::vector<CaseLine> lines = {{"confirmed case", cond::Truth::Yes}, {"local infection", cond::Truth::Unknown}};
    CHECK(parse_structured_case(render_structured_case(lines)) == lines);
    auto parsed = parse_structured_case("1. Confirmed Cases: Yes.\n2. Suspected cases: no\nnonsense\n3. X: maybe");
    REQUIRE(parsed.size() == 3);
    CHECK(parsed[0] == CaseLine{"confirmed cases", cond::Truth::Yes});
    CHECK(parsed[1].second == cond::Truth::No);
    CHECK(parsed[2].second == cond::Truth::Unknown);
    CHECK(render_slot(Json("text")) == "text");
    CHECK(render_slot(Json::array({"a", "b"})) == "1. a\n2. b");
    CHECK(render_slot(Json{{"k", 1}}) == "{\n  \"k\": 1\n}");
}

TEST_CASE("scripted backend plays back in order and then refuses") {
    ScriptedBackend b({"one", "two"});
    ModelRequest r;
    CHECK(complete(b, r).text == "one");
    auto second = complete(b, r);
    CHECK(second.text == "two");
    CHECK(second.backend == "scripted");
    CHECK_THROWS_AS(b.generate(r), BackendRefusal);
}

TEST_CASE("scripted backend loads the fixture transcript") {
    auto b = ScriptedBackend::from_file(kFixtures / "transcripts" / "pertussis-identify.json");
    CHECK(b.remaining() == 2);
    ModelRequest r;
    CHECK(extract_json_value(b.generate(r))["Epidemic Type"] == "Pertussis");
}

TEST_CASE("scripted backend hands each reply out exactly once under concurrency") {
    std::vector<std::string> replies;
    for (int i = 0; i < 400; ++i) replies.push_back(std::to_string(i));
    ScriptedBackend b(replies);
    std::mutex mu;
    std::multiset<std::string> got;
    std::vector<std::thread> threads;
    for (int t = 0; t < 8; ++t) {
        threads.emplace_back([&] {
            for (int i = 0; i < 50; ++i) {
                auto s = b.generate({});
                std::lock_guard lock(mu);
                got.insert(s);
            }
        });
    }
    for (auto& t : threads) t.join();
    CHECK(got == std::multiset<std::string>(replies.begin(), replies.end()));
}

TEST_CASE("http backend speaks chat completions to a loopback stub") {
    httplib::Server server;
    Json last_body;
    std::string last_auth;
    server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        last_body = Json::parse(req.body);
        last_auth = req.get_header_value("Authorization");
        Json reply;
        reply["choices"] = Json::array({Json{{"message", Json{{"role", "assistant"}, {"content", "fixed reply"}}}}});
        res.set_content(reply.dump(), "application/json");
    });
    server.Post("/fail", [](const httplib::Request&, httplib::Response& res) { res.status = 503; });
    server.Post("/deny", [](const httplib::Request&, httplib::Response& res) {
        res.status = 400;
        res.set_content("bad model", "text/plain");
    });
    int port = server.bind_to_any_port("127.0.0.1");
    std::thread th([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    const std::string base = "http://127.0.0.1:" + std::to_string(port);
    HttpBackend ok({base + "/v1/chat/completions", "secret", "test-model", std::chrono::seconds(5)});
    auto req = make_request(TemplateId::ExtractConditionPoints, {{"all_trigger_conditions", "1. Confirmed Case"}});
    auto res = complete(ok, req);
    CHECK(res.text == "fixed reply");
    CHECK(res.backend == "http:test-model");
    CHECK(res.latency_ms >= 0);
    CHECK(last_auth == "Bearer secret");
    CHECK(last_body["model"] == "test-model");
    CHECK(last_body["temperature"] == 0.0);
    CHECK(last_body["messages"][0]["content"] == req.prompt);

    HttpBackend fail({base + "/fail", "", "m", std::chrono::seconds(5)});
    CHECK_THROWS_AS(fail.generate(req), TransportError);
    HttpBackend deny({base + "/deny", "", "m", std::chrono::seconds(5)});
    CHECK_THROWS_AS(deny.generate(req), BackendRefusal);

    server.stop();
    th.join();
    HttpBackend gone({base + "/v1/chat/completions", "", "m", std::chrono::seconds(1)});
    CHECK_THROWS_AS(gone.generate(req), TransportError);
}

TEST_CASE("http config parsing") {
    auto c = http_config_from_json(Json::parse(R"({"endpoint":"https://x/y","model":"m","timeout_seconds":5})"));
    CHECK(c.endpoint == "https://x/y");
    CHECK(c.timeout == std::chrono::seconds(5));
    CHECK_THROWS(HttpBackend({"not-a-url", "", "m"}));
}

TEST_CASE("mock identifies the epidemic by longest name match") {
    CHECK(match_epidemic_type(kDiseases, "Patient diagnosed with dengue while travelling") == "Dengue Fever");
    CHECK(match_epidemic_type(kDiseases, "Hand-foot-and-mouth disease cluster in a kindergarten") ==
          "Hand-Foot-and-Mouth Disease");
    CHECK(match_epidemic_type(kDiseases, "influenza-like illness") == "Influenza");
    CHECK_FALSE(match_epidemic_type(kDiseases, "unexplained fever").has_value());
    std::vector<std::string> tied = {"Zeta Fever", "Alpha Fever"};
    CHECK(match_epidemic_type(tied, "zeta fever and alpha fever") == "Alpha Fever");

    RuleBasedMock mock;
    auto req = make_request(TemplateId::EpidemicTypeExtraction,
                            {{"candidate_epidemic_types", render_numbered_list(kDiseases)},
                             {"epidemic_reporting_information", "A student was diagnosed with dengue."}});
    CHECK(mock.generate(req) == R"({"Epidemic Type":"Dengue Fever"})");
    CHECK(extract_json_value(mock.generate(req))["Epidemic Type"] == "Dengue Fever");
    req.bindings["epidemic_reporting_information"] = "An unexplained fever.";
    CHECK(extract_json_value(mock.generate(req))["Epidemic Type"] == "Unknown");
}

TEST_CASE("mock condition points are the collected atoms") {
    RuleBasedMock mock;
    std::vector<std::string> triggers = {"Confirmed OR Suspected Case", "Confirmed Case AND High Aedes Density"};
    auto out = mock.generate(make_request(TemplateId::ExtractConditionPoints,
                                          {{"all_trigger_conditions", render_numbered_list(triggers)}}));
    CHECK(out == "1. confirmed case\n2. suspected case\n3. high aedes density");
}

TEST_CASE("fact judgement: negation prefix, plural, last mention wins") {
    std::vector<Fact> facts = {{"Two confirmed cases reported", false},
                               {"No travel history outside City S", false},
                               {"Cluster outbreak", true},
                               {"Later: cluster outbreak confirmed", false}};
    CHECK(judge_point("confirmed case", facts) == cond::Truth::Yes);
    CHECK(judge_point("travel history outside city s", facts) == cond::Truth::No);
    CHECK(judge_point("cluster outbreak", facts) == cond::Truth::Yes);
    CHECK(judge_point("suspected case", facts) == cond::Truth::Unknown);
    CHECK(find_point("unconfirmed case", "confirmed case") == std::string::npos);
    CHECK(find_point("confirmed cases", "confirmed case") == 0);
    CHECK(find_point("confirmed casework", "confirmed case") == std::string::npos);
}

TEST_CASE("facts come from the matching scenario, then field findings") {
    auto scenarios = load_scenarios(kFixtures / "scenarios");
    REQUIRE(scenarios.size() == 16);
    const auto& dengue = *std::find_if(scenarios.begin(), scenarios.end(),
                                       [](const Scenario& s) { return s.id == "dengue-fever-1"; });
    auto report = with_field_findings(dengue.report, {"Gene sequencing results received"});
    CHECK(field_findings(report) == std::vector<std::string>{"Gene sequencing results received"});
    auto facts = facts_for_report(scenarios, report);
    CHECK(facts.size() == dengue.facts.size() + dengue.negations.size() + 1);
    CHECK(facts.back().text == "Gene sequencing results received");

    auto free_facts = facts_for_report(scenarios, "Confirmed case at a school. No cluster outbreak.");
    REQUIRE(free_facts.size() == 2);
    CHECK(judge_point("cluster outbreak", free_facts) == cond::Truth::No);
}

TEST_CASE("scenario fixtures round trip through JSON") {
    for (const auto& s : load_scenarios(kFixtures / "scenarios")) {
        auto again = scenario_from_json(to_json(s));
        CHECK(to_json(again) == to_json(s));
        CHECK_FALSE(s.checklist.required_actions.empty());
        CHECK(s.feedback_rounds.size() == 1);
    }
}

TEST_CASE("mock task list for the dengue case starts with team deployment") {
    auto kb = kb::load_knowledge_base(kFixtures / "kb");
    auto scenarios = load_scenarios(kFixtures / "scenarios");
    RuleBasedMock mock(scenarios);
    const auto& plans = kb::retrieve_candidate_plans(kb, "Dengue Fever");
    const auto& s = scenarios[std::size_t(std::find_if(scenarios.begin(), scenarios.end(),
                                                       [](const Scenario& x) { return x.id == "dengue-fever-1"; }) -
                                          scenarios.begin())];
    auto points = kb::extract_condition_points(plans);
    auto structured = mock.generate(make_request(
        TemplateId::CaseStructuring, {{"condition_points", render_numbered_list(points)},
                                      {"epidemic_reporting_information", s.report}}));
    auto list = extract_json_value(mock.generate(make_request(
        TemplateId::TaskListInitial, {{"risk_cases", "Risk Level: B\n" + s.risk_case_info},
                                      {"basic_case_information", s.basic_case_info},
                                      {"structured_info", structured},
                                      {"candidate_plans", plans_json(plans).dump(2)}})));
    REQUIRE(list.is_array());
    REQUIRE(list.size() == 13);
    CHECK(list[0]["Action"] == "Team Deployment");
    CHECK(list[0]["Time Limit"] == "2 hours");
    CHECK(list[0]["Responsible Party"] == "District Y CDC");
    CHECK(list[1]["Responsible Party"] == "City CDC, District Y CDC");
    std::vector<std::string> keys;
    for (const auto& [k, v] : list[0].items()) keys.push_back(k);
    CHECK(keys == std::vector<std::string>{"Action", "Work Requirement", "Responsible Party", "Time Limit"});
}

TEST_CASE("mock task list is empty when nothing triggers") {
    RuleBasedMock mock;
    kb::ResponseAction a;
    a.action = "X";
    a.trigger_condition_raw = "Cluster Outbreak";
    a.work_requirement = "w";
    a.time_limit = "1 day";
    auto out = mock.generate(make_request(TemplateId::TaskListInitial,
                                          {{"risk_cases", "Risk Level: C"},
                                           {"basic_case_information", ""},
                                           {"structured_info", "1. cluster outbreak: No"},
                                           {"candidate_plans", plans_json({a}).dump()}}));
    CHECK(extract_json_value(out) == Json::array());
}

TEST_CASE("mock selection equals the brute-force filter on every fixture scenario, both rounds") {
    auto kb = kb::load_knowledge_base(kFixtures / "kb");
    auto scenarios = load_scenarios(kFixtures / "scenarios");
    RuleBasedMock mock(scenarios);
    for (const auto& s : scenarios) {
        CAPTURE(s.id);
        const auto& plans = kb::retrieve_candidate_plans(kb, s.disease);
        auto points = kb::extract_condition_points(plans);
        const std::string risk = "Risk Level: " + kb::to_string(s.risk_level) + "\n" + s.risk_case_info;

        auto run_round = [&](const std::string& report, const std::set<testing::ActionKey>& completed, bool iterative) {
            auto structured = mock.generate(make_request(
                TemplateId::CaseStructuring,
                {{"condition_points", render_numbered_list(points)}, {"epidemic_reporting_information", report}}));
            Bindings b = {{"risk_cases", risk},
                          {"basic_case_information", s.basic_case_info},
                          {"structured_info", structured},
                          {"candidate_plans", plans_json(plans).dump(2)}};
            if (iterative) {
                Json prev;
                prev["completed_actions"] = Json::array();
                for (const auto& [act, work] : completed)
                    prev["completed_actions"].push_back(Json{{"Action", act}, {"Work Requirement", work}});
                b["previous_task_feedback"] = prev.dump(2);
            }
            auto got = extract_json_value(
                mock.generate(make_request(iterative ? TemplateId::TaskListIterative : TemplateId::TaskListInitial, b)));
            auto want = testing::oracle_select(plans, parse_structured_case(structured), completed);
            REQUIRE(got.size() == want.size());
            for (std::size_t i = 0; i < want.size(); ++i) {
                const auto& p = plans[want[i]];
                CHECK(got[i]["Action"] == p.action);
                CHECK(got[i]["Work Requirement"] == p.work_requirement);
                CHECK(got[i]["Responsible Party"] == kb::select_responsible_party(p, s.risk_level));
                CHECK(got[i]["Time Limit"] == p.time_limit);
            }
            return got;
        };

        auto round1 = run_round(s.report, {}, false);
        CHECK(round1.size() > 0);
        std::set<testing::ActionKey> completed;
        for (const auto& item : round1)
            completed.insert(testing::action_key(item["Action"].get<std::string>(), item["Work Requirement"].get<std::string>()));
        run_round(with_field_findings(s.report, s.feedback_rounds.front().new_facts), completed, true);
    }
}

TEST_CASE("mock answers are a pure function of the request") {
    auto scenarios = load_scenarios(kFixtures / "scenarios");
    RuleBasedMock a(scenarios), b(scenarios);
    auto req = make_request(TemplateId::CaseStructuring,
                            {{"condition_points", "1. confirmed case\n2. severe case"},
                             {"epidemic_reporting_information", scenarios[0].report}});
    CHECK(a.generate(req) == a.generate(req));
    CHECK(a.generate(req) == b.generate(req));
}

TEST_CASE("mock refuses ad-hoc prompts") {
    RuleBasedMock mock;
    auto req = make_request(PromptTemplate::make("custom", "Say {thing}"), {{"thing", "hi"}});
    CHECK_FALSE(req.template_id.has_value());
    CHECK_THROWS_AS(mock.generate(req), BackendRefusal);
}

TEST_CASE("recording backend captures a replayable transcript") {
    ScriptedBackend inner({"a", "b"});
    RecordingBackend rec(inner);
    rec.generate({});
    rec.generate({});
    ScriptedBackend replay(rec.transcript()["replies"].get<std::vector<std::string>>());
    CHECK(replay.generate({}) == "a");
    CHECK(replay.generate({}) == "b");
}
