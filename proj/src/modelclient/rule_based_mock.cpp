#include "epiplan/modelclient/rule_based_mock.hpp"

#include <cctype>
#include <regex>
#include <set>

#include "epiplan/common/text.hpp"
#include "epiplan/knowledge/knowledge_base.hpp"
#include "epiplan/modelclient/json_extract.hpp"
#include "epiplan/modelclient/text_lists.hpp"

namespace epiplan::model {

namespace {

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

const std::string& binding(const ModelRequest& r, const char* name) {
    auto it = r.bindings.find(name);
    if (it == r.bindings.end()) throw BackendRefusal(std::string("mock: request lacks binding ") + name);
    return it->second;
}

// Slots may hold a JSON array of strings or a numbered list.
std::vector<std::string> string_items(const std::string& slot) {
    auto j = Json::parse(slot, nullptr, false);
    if (!j.is_discarded() && j.is_array()) {
        std::vector<std::string> out;
        for (const auto& v : j)
            if (v.is_string()) out.push_back(v.get<std::string>());
        return out;
    }
    return parse_list_items(slot);
}

std::string respond_epidemic_type(const ModelRequest& r) {
    auto candidates = string_items(binding(r, "candidate_epidemic_types"));
    auto match = match_epidemic_type(candidates, binding(r, "epidemic_reporting_information"));
    Json out;
    out["Epidemic Type"] = match ? *match : "Unknown";
    return out.dump();
}

std::string respond_condition_points(const ModelRequest& r) {
    std::vector<cond::CondExpr> exprs;
    for (const auto& trigger : string_items(binding(r, "all_trigger_conditions"))) {
        if (text::canonical(trigger).empty()) continue;
        exprs.push_back(cond::parse_condition(trigger).expr);
    }
    auto atoms = cond::collect_atoms(exprs);
    return render_numbered_list(atoms);
}

std::string respond_case_structuring(const ModelRequest& r, const std::vector<Scenario>& scenarios) {
    auto points = parse_list_items(binding(r, "condition_points"));
    auto facts = facts_for_report(scenarios, binding(r, "epidemic_reporting_information"));
    std::vector<CaseLine> lines;
    for (const auto& p : points) {
        auto point = text::canonical(p);
        lines.emplace_back(point, judge_point(point, facts));
    }
    return render_structured_case(lines);
}

kb::RiskLevel risk_level_of(const std::string& risk_cases) {
    static const std::regex re(R"(risk level\s*:\s*([abcd])\b)", std::regex::icase);
    std::smatch m;
    if (std::regex_search(risk_cases, m, re)) return *kb::parse_risk_level(m[1].str());
    return kb::RiskLevel::A;
}

std::string respond_task_list(const ModelRequest& r, bool iterative) {
    const Json plans = extract_json_value(binding(r, "candidate_plans"));
    if (!plans.is_array()) throw BackendRefusal("mock: candidate_plans is not a JSON array");

    cond::TruthAssignment assignment;
    for (auto& [point, truth] : parse_structured_case(binding(r, "structured_info")))
        assignment[point] = truth == cond::Truth::Unknown ? cond::Truth::No : truth;

    std::set<std::pair<std::string, std::string>> completed;
    if (iterative) {
        auto prev = Json::parse(binding(r, "previous_task_feedback"), nullptr, false);
        if (!prev.is_discarded() && prev.is_object() && prev.contains("completed_actions")) {
            for (const auto& c : prev["completed_actions"]) {
                completed.emplace(text::canonical(c.value("Action", "")), text::canonical(c.value("Work Requirement", "")));
            }
        }
    }

    const auto level = risk_level_of(binding(r, "risk_cases"));
    Json out = Json::array();
    for (std::size_t i = 0; i < plans.size(); ++i) {
        std::vector<kb::MalformedRecord> ignored;
        auto rec = kb::parse_response_action(plans[i], "candidate_plans", i, ignored);
        if (!rec) continue;
        // Atoms the structured case never mentions count as No as well.
        for (const auto& atom : cond::collect_atoms(std::span(&rec->trigger_condition, 1)))
            assignment.try_emplace(atom, cond::Truth::No);
        if (cond::evaluate_condition(rec->trigger_condition, assignment) != cond::Truth::Yes) continue;
        if (completed.contains({text::canonical(rec->action), text::canonical(rec->work_requirement)})) continue;
        Json item;
        item["Action"] = rec->action;
        item["Work Requirement"] = rec->work_requirement;
        item["Responsible Party"] = kb::select_responsible_party(*rec, level);
        item["Time Limit"] = rec->time_limit;
        out.push_back(std::move(item));
    }
    return out.dump(2);
}

std::vector<std::string> sentences(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        auto t = text::trim(cur);
        if (!t.empty()) out.push_back(std::move(t));
        cur.clear();
    };
    for (char c : s) {
        if (c == '.' || c == ';' || c == '\n') flush();
        else cur.push_back(c);
    }
    flush();
    return out;
}

// `s` ends with the whole word(s) `suffix`.
bool ends_with_words(std::string_view s, std::string_view suffix) {
    if (s.size() < suffix.size() || s.substr(s.size() - suffix.size()) != suffix) return false;
    return s.size() == suffix.size() || !is_word_char(s[s.size() - suffix.size() - 1]);
}

}  // namespace

std::string RuleBasedMock::generate(const ModelRequest& request) {
    if (!request.template_id) throw BackendRefusal("mock: no rule for ad-hoc prompt " + request.template_name);
    switch (*request.template_id) {
        case TemplateId::EpidemicTypeExtraction: return respond_epidemic_type(request);
        case TemplateId::ExtractConditionPoints: return respond_condition_points(request);
        case TemplateId::CaseStructuring: return respond_case_structuring(request, scenarios_);
        case TemplateId::TaskListInitial: return respond_task_list(request, false);
        case TemplateId::TaskListIterative: return respond_task_list(request, true);
    }
    throw BackendRefusal("mock: unsupported template");
}

std::optional<std::string> match_epidemic_type(std::span<const std::string> candidates, std::string_view report) {
    const auto haystack = text::canonical(report);
    std::optional<std::string> best;
    std::size_t best_len = 0;
    for (const auto& name : candidates) {
        const auto full = text::canonical(name);
        if (full.empty()) continue;
        std::vector<std::string> keys = {full};
        auto space = full.find(' ');
        if (space != std::string::npos && space >= 4) keys.push_back(full.substr(0, space));
        std::size_t len = 0;
        for (const auto& k : keys)
            if (text::find_word(haystack, k) != std::string::npos) len = std::max(len, k.size());
        if (len == 0) continue;
        if (len > best_len || (len == best_len && name < *best)) {
            best = name;
            best_len = len;
        }
    }
    return best;
}

std::vector<Fact> facts_for_report(const std::vector<Scenario>& scenarios, std::string_view report) {
    std::vector<Fact> facts;
    std::string_view body = report;
    if (auto pos = report.find(kFieldFindingsHeader); pos != std::string_view::npos) body = report.substr(0, pos);

    if (const Scenario* s = find_scenario_for_report(scenarios, body)) {
        for (const auto& f : s->facts) facts.push_back({f, false});
        for (const auto& n : s->negations) facts.push_back({n, true});
    } else {
        for (auto& sentence : sentences(body)) facts.push_back({std::move(sentence), false});
    }
    for (auto& f : field_findings(report)) facts.push_back({std::move(f), false});
    return facts;
}

std::size_t find_point(std::string_view text, std::string_view point, std::size_t from) {
    if (point.empty()) return std::string::npos;
    while (from < text.size()) {
        auto pos = text.find(point, from);
        if (pos == std::string_view::npos) return std::string::npos;
        bool left_ok = pos == 0 || !is_word_char(text[pos - 1]);
        auto end = pos + point.size();
        auto boundary = [&](std::size_t e) { return e == text.size() || !is_word_char(text[e]); };
        bool right_ok = boundary(end) || (end < text.size() && text[end] == 's' && boundary(end + 1)) ||
                        (end + 1 < text.size() && text.substr(end, 2) == "es" && boundary(end + 2));
        if (left_ok && right_ok) return pos;
        from = pos + 1;
    }
    return std::string::npos;
}

cond::Truth judge_point(std::string_view point, std::span<const Fact> facts) {
    const auto p = text::canonical(point);
    cond::Truth verdict = cond::Truth::Unknown;
    for (const auto& f : facts) {
        const auto t = text::canonical(f.text);
        auto pos = find_point(t, p);
        if (pos == std::string::npos) continue;
        const auto before = std::string_view(t).substr(0, pos);
        const bool negated = f.negative || ends_with_words(before, "no ") || ends_with_words(before, "not ");
        verdict = negated ? cond::Truth::No : cond::Truth::Yes;
    }
    return verdict;
}

}  // namespace epiplan::model
