#include "epiplan/pipeline/types.hpp"

#include <chrono>
#include <ctime>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "epiplan/common/text.hpp"
#include "epiplan/pipeline/errors.hpp"

namespace epiplan::pipeline {

namespace {

std::string string_field(const Json& j, const char* name) {
    if (!j.is_object() || !j.contains(name) || !j[name].is_string())
        throw std::invalid_argument(std::string("expected string field \"") + name + "\"");
    return j[name].get<std::string>();
}

std::string optional_string(const Json& j, const char* name) {
    if (!j.contains(name) || j[name].is_null()) return {};
    if (!j[name].is_string()) throw std::invalid_argument(std::string("field \"") + name + "\" must be a string");
    return j[name].get<std::string>();
}

std::vector<std::string> string_list(const Json& j, const char* name) {
    std::vector<std::string> out;
    if (!j.contains(name) || j[name].is_null()) return out;
    if (!j[name].is_array()) throw std::invalid_argument(std::string("field \"") + name + "\" must be an array");
    for (const auto& v : j[name]) {
        if (!v.is_string()) throw std::invalid_argument(std::string("field \"") + name + "\" must hold strings");
        out.push_back(v.get<std::string>());
    }
    return out;
}

kb::RiskLevel risk_level_field(const Json& j) {
    auto level = kb::parse_risk_level(string_field(j, "risk_level"));
    if (!level) throw std::invalid_argument("risk_level must be one of A, B, C, D");
    return *level;
}

}  // namespace

void validate(const EpidemicReport& report) {
    if (text::trim(report.report_text).empty()) throw std::invalid_argument("report text is empty");
}

std::string risk_cases_text(const EpidemicReport& report) {
    std::string out = "Risk Level: " + kb::to_string(report.risk_level);
    if (!report.risk_case_info.empty()) out += "\n" + report.risk_case_info;
    return out;
}

Json to_json(const EpidemicReport& report) {
    Json j;
    j["report_text"] = report.report_text;
    j["risk_level"] = kb::to_string(report.risk_level);
    j["basic_case_info"] = report.basic_case_info;
    j["risk_case_info"] = report.risk_case_info;
    return j;
}

EpidemicReport report_from_json(const Json& j) {
    EpidemicReport r;
    r.report_text = string_field(j, "report_text");
    r.risk_level = risk_level_field(j);
    r.basic_case_info = optional_string(j, "basic_case_info");
    r.risk_case_info = optional_string(j, "risk_case_info");
    return r;
}

cond::Truth StructuredCase::verdict(std::string_view point) const {
    auto key = text::canonical(point);
    for (const auto& [p, t] : lines)
        if (p == key) return t;
    return cond::Truth::Unknown;
}

cond::TruthAssignment StructuredCase::assignment() const {
    cond::TruthAssignment out;
    for (const auto& [p, t] : lines) out[p] = t;
    return out;
}

std::vector<std::string> StructuredCase::unknown_points() const {
    std::vector<std::string> out;
    for (const auto& [p, t] : lines)
        if (t == cond::Truth::Unknown) out.push_back(p);
    return out;
}

Json to_json(const StructuredCase& c) {
    Json out = Json::array();
    for (const auto& [p, t] : c.lines) out.push_back(Json{{"point", p}, {"verdict", cond::to_string(t)}});
    return out;
}

StructuredCase structured_case_from_json(const Json& j) {
    if (!j.is_array()) throw std::invalid_argument("structured case must be an array");
    StructuredCase c;
    for (const auto& line : j)
        c.lines.emplace_back(string_field(line, "point"), cond::truth_from_string(string_field(line, "verdict")));
    return c;
}

Json to_json(const TaskItem& item) {
    Json j;
    j["Action"] = item.action;
    j["Work Requirement"] = item.work_requirement;
    j["Responsible Party"] = item.responsible_party;
    j["Time Limit"] = item.time_limit;
    return j;
}

TaskItem task_item_from_json(const Json& j) {
    if (!j.is_object()) throw MalformedTaskItem("task item is not an object: " + j.dump());
    auto get = [&](std::initializer_list<const char*> names) {
        for (const char* name : names) {
            if (!j.contains(name)) continue;
            if (!j[name].is_string() || text::trim(j[name].get<std::string>()).empty())
                throw MalformedTaskItem(std::string("task item field \"") + name + "\" must be a nonempty string");
            return j[name].get<std::string>();
        }
        throw MalformedTaskItem(std::string("task item lacks \"") + *names.begin() + "\"");
    };
    TaskItem item;
    item.action = get({"Action"});
    item.work_requirement = get({"Work Requirement", "Work Requirements"});
    item.responsible_party = get({"Responsible Party"});
    item.time_limit = get({"Time Limit"});
    return item;
}

Json to_json(const std::vector<TaskItem>& items) {
    Json out = Json::array();
    for (const auto& i : items) out.push_back(to_json(i));
    return out;
}

std::string_view to_string(GroundingFlag f) {
    switch (f) {
        case GroundingFlag::Hallucinated: return "Hallucinated";
        case GroundingFlag::PartyMismatch: return "PartyMismatch";
        case GroundingFlag::TimeLimitMismatch: return "TimeLimitMismatch";
    }
    return "?";
}

GroundingFlag grounding_flag_from_string(std::string_view s) {
    for (auto f : {GroundingFlag::Hallucinated, GroundingFlag::PartyMismatch, GroundingFlag::TimeLimitMismatch})
        if (to_string(f) == s) return f;
    throw std::invalid_argument("unknown grounding flag: " + std::string(s));
}

std::size_t GroundingReport::count(GroundingFlag f) const {
    std::size_t n = 0;
    for (const auto& item : items)
        for (auto g : item.flags) n += g == f;
    return n;
}

bool GroundingReport::clean() const {
    for (const auto& item : items)
        if (!item.flags.empty()) return false;
    return true;
}

Json to_json(const GroundingReport& g) {
    Json j;
    j["items"] = Json::array();
    for (const auto& item : g.items) {
        Json e;
        e["record"] = item.record ? Json(*item.record) : Json(nullptr);
        e["flags"] = Json::array();
        for (auto f : item.flags) e["flags"].push_back(to_string(f));
        j["items"].push_back(std::move(e));
    }
    j["hallucinated"] = g.count(GroundingFlag::Hallucinated);
    j["party_mismatches"] = g.count(GroundingFlag::PartyMismatch);
    j["time_limit_mismatches"] = g.count(GroundingFlag::TimeLimitMismatch);
    j["unknown_points"] = g.unknown_points;
    return j;
}

GroundingReport grounding_from_json(const Json& j) {
    GroundingReport g;
    if (!j.is_object() || !j.contains("items") || !j["items"].is_array())
        throw std::invalid_argument("grounding report lacks items");
    for (const auto& e : j["items"]) {
        ItemGrounding item;
        if (e.contains("record") && !e["record"].is_null()) item.record = e["record"].get<std::size_t>();
        for (const auto& f : e.value("flags", Json::array())) item.flags.push_back(grounding_flag_from_string(f.get<std::string>()));
        g.items.push_back(std::move(item));
    }
    g.unknown_points = string_list(j, "unknown_points");
    return g;
}

Json to_json(const TaskList& list, bool with_timestamp) {
    Json j;
    j["round"] = list.round;
    if (with_timestamp) j["generated_at"] = list.generated_at;
    j["tasks"] = to_json(list.items);
    j["grounding"] = to_json(list.grounding);
    return j;
}

TaskList task_list_from_json(const Json& j) {
    TaskList list;
    if (!j.is_object() || !j.contains("round") || !j["round"].is_number_integer())
        throw std::invalid_argument("task list lacks an integer round");
    list.round = j["round"].get<int>();
    if (list.round < 1) throw std::invalid_argument("task list round must be at least 1");
    list.generated_at = optional_string(j, "generated_at");
    if (!j.contains("tasks") || !j["tasks"].is_array()) throw std::invalid_argument("task list lacks tasks");
    for (const auto& t : j["tasks"]) list.items.push_back(task_item_from_json(t));
    if (j.contains("grounding")) list.grounding = grounding_from_json(j["grounding"]);
    return list;
}

std::string_view to_string(FeedbackStatus s) {
    switch (s) {
        case FeedbackStatus::Completed: return "Completed";
        case FeedbackStatus::InProgress: return "InProgress";
        case FeedbackStatus::Blocked: return "Blocked";
    }
    return "?";
}

FeedbackStatus feedback_status_from_string(std::string_view s) {
    std::string key;
    for (char c : text::canonical(s))
        if (c != ' ' && c != '_' && c != '-') key.push_back(c);
    if (key == "completed") return FeedbackStatus::Completed;
    if (key == "inprogress") return FeedbackStatus::InProgress;
    if (key == "blocked") return FeedbackStatus::Blocked;
    throw std::invalid_argument("unknown feedback status: " + std::string(s));
}

Json to_json(const Feedback& f) {
    Json j;
    j["items"] = Json::array();
    for (const auto& e : f.entries)
        j["items"].push_back(Json{{"index", e.index}, {"status", to_string(e.status)}, {"note", e.note}});
    j["new_facts"] = f.new_facts;
    return j;
}

Feedback feedback_from_json(const Json& j) {
    if (!j.is_object()) throw std::invalid_argument("feedback must be an object");
    Feedback f;
    if (j.contains("items")) {
        if (!j["items"].is_array()) throw std::invalid_argument("feedback items must be an array");
        for (const auto& e : j["items"]) {
            const bool whole = e.is_object() && e.contains("index") && e["index"].is_number_integer();
            if (!whole || (!e["index"].is_number_unsigned() && e["index"].get<std::int64_t>() < 0))
                throw std::invalid_argument("feedback item needs a non-negative integer index");
            FeedbackEntry entry;
            entry.index = e["index"].get<std::size_t>();
            entry.status = feedback_status_from_string(string_field(e, "status"));
            entry.note = optional_string(e, "note");
            f.entries.push_back(std::move(entry));
        }
    }
    f.new_facts = string_list(j, "new_facts");
    return f;
}

std::string_view to_string(SessionStatus s) { return s == SessionStatus::Open ? "Open" : "Closed"; }

std::vector<std::string> PlanningSession::new_facts() const {
    std::vector<std::string> out;
    for (const auto& r : rounds)
        if (r.feedback) out.insert(out.end(), r.feedback->new_facts.begin(), r.feedback->new_facts.end());
    return out;
}

Json to_json(const PlanningSession& s, bool with_timestamps) {
    Json j;
    j["id"] = s.id;
    j["status"] = to_string(s.status);
    j["report"] = to_json(s.report);
    j["disease"] = s.disease ? Json(*s.disease) : Json(nullptr);
    j["condition_points"] = s.condition_points;
    j["structured_case"] = to_json(s.structured_case);
    j["rounds"] = Json::array();
    for (const auto& r : s.rounds) {
        Json rj = to_json(r.tasks, with_timestamps);
        rj["feedback"] = r.feedback ? to_json(*r.feedback) : Json(nullptr);
        j["rounds"].push_back(std::move(rj));
    }
    return j;
}

PlanningSession session_from_json(const Json& j) {
    PlanningSession s;
    s.id = string_field(j, "id");
    auto status = string_field(j, "status");
    if (status != "Open" && status != "Closed") throw std::invalid_argument("unknown session status: " + status);
    s.status = status == "Open" ? SessionStatus::Open : SessionStatus::Closed;
    s.report = report_from_json(j.at("report"));
    if (j.contains("disease") && !j["disease"].is_null()) s.disease = j["disease"].get<std::string>();
    s.condition_points = string_list(j, "condition_points");
    if (j.contains("structured_case")) s.structured_case = structured_case_from_json(j["structured_case"]);
    for (const auto& rj : j.value("rounds", Json::array())) {
        Round r;
        r.tasks = task_list_from_json(rj);
        if (rj.contains("feedback") && !rj["feedback"].is_null()) r.feedback = feedback_from_json(rj["feedback"]);
        s.rounds.push_back(std::move(r));
    }
    return s;
}

std::string iso_timestamp_now() {
    using namespace std::chrono;
    const auto now = system_clock::now();
    const auto ms = duration_cast<milliseconds>(now.time_since_epoch()).count() % 1000;
    const std::time_t t = system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%S") << '.' << std::setw(3) << std::setfill('0') << ms << 'Z';
    return os.str();
}

}  // namespace epiplan::pipeline
