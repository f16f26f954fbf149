#include "epiplan/modelclient/prompts.hpp"

#include <array>
#include <regex>

namespace epiplan::model {

namespace {

const std::regex& placeholder_re() {
    static const std::regex re(R"(\{([a-z_][a-z0-9_]*)\})");
    return re;
}

constexpr std::string_view kPrompt1 =
    "Based on the epidemic reporting information, select and determine the specific epidemic type from the "
    "candidate list, and return the result in JSON format, \n"
    "e.g., {\"Epidemic Type\": \"xxx\"}.\n"
    "Candidate Epidemic Types: {candidate_epidemic_types}\n"
    "Epidemic Reporting Information: {epidemic_reporting_information}\n"
    "Answer:";

constexpr std::string_view kPrompt2 =
    "Based on the candidate plans, extract each independent, atomic condition point from the trigger conditions "
    "and list them out. Do not repeat or categorize them.\n"
    "Example:\n"
    "1. Confirmed cases\n"
    "2. Suspected cases\n"
    "3. Clinically diagnosed cases.\n"
    "\n"
    "Candidate Plan - Trigger Conditions: {all_trigger_conditions}\n"
    "Answer:";

constexpr std::string_view kPrompt3 =
    "Condition Points: {condition_points}\n"
    "Epidemic Reporting Information: {epidemic_reporting_information}\n"
    "\n"
    "Based on the epidemic reporting information, output the structured analysis according to the condition "
    "points. Example:\n"
    "1. Confirmed cases: Yes\n"
    "2. Suspected cases: No\n"
    "\n"
    "Answer:";

constexpr std::string_view kPrompt4 =
    "Risk Cases: {risk_cases}\n"
    "Basic Case Information: {basic_case_information}\n"
    "Structured Epidemic Reporting Information: {structured_info}\n"
    "Candidate Plans: {candidate_plans}\n"
    "\n"
    "Based on all the information provided above, select the next task list from the candidate plans, and "
    "strictly output in JSON format:\n"
    "[{\"Action\": \"xxx\", \"Work Requirement\": \"xxx\", \"Responsible Party\": \"xxx\", \"Time Limit\": "
    "\"xxx\"}, ...]\n"
    "Answer:";

constexpr std::string_view kPrompt5 =
    "Risk Cases: {risk_cases}\n"
    "Basic Case Information: {basic_case_information}\n"
    "Structured Epidemic Reporting Information: {structured_info}\n"
    "Candidate Plans: {candidate_plans}\n"
    "Previous Task List and Feedback: {previous_task_feedback}\n"
    "\n"
    "Based on all the information provided above and the previous task list and feedback, select the next round "
    "of the task list from the candidate plans, and strictly output in JSON format:\n"
    "[{\"Action\": \"xxx\", \"Work Requirement\": \"xxx\", \"Responsible Party\": \"xxx\", \"Time Limit\": "
    "\"xxx\"}, ...]\n"
    "Answer:";

}  // namespace

std::string_view to_string(TemplateId id) {
    switch (id) {
        case TemplateId::EpidemicTypeExtraction: return "EpidemicTypeExtraction";
        case TemplateId::ExtractConditionPoints: return "ExtractConditionPoints";
        case TemplateId::CaseStructuring: return "CaseStructuring";
        case TemplateId::TaskListInitial: return "TaskListInitial";
        case TemplateId::TaskListIterative: return "TaskListIterative";
    }
    return "";
}

const std::vector<TemplateId>& all_templates() {
    static const std::vector<TemplateId> ids = {TemplateId::EpidemicTypeExtraction, TemplateId::ExtractConditionPoints,
                                                TemplateId::CaseStructuring, TemplateId::TaskListInitial,
                                                TemplateId::TaskListIterative};
    return ids;
}

std::optional<TemplateId> template_from_string(std::string_view name) {
    for (auto id : all_templates())
        if (to_string(id) == name) return id;
    return std::nullopt;
}

std::set<std::string> placeholders_in(std::string_view body) {
    std::set<std::string> names;
    std::string s(body);
    for (auto it = std::sregex_iterator(s.begin(), s.end(), placeholder_re()); it != std::sregex_iterator(); ++it)
        names.insert((*it)[1].str());
    return names;
}

PromptTemplate PromptTemplate::make(std::string name, std::string body) {
    PromptTemplate t{std::move(name), std::move(body), {}};
    t.placeholders = placeholders_in(t.body);
    return t;
}

const PromptTemplate& builtin_template(TemplateId id) {
    static const std::array<PromptTemplate, 5> templates = {
        PromptTemplate::make("EpidemicTypeExtraction", std::string(kPrompt1)),
        PromptTemplate::make("ExtractConditionPoints", std::string(kPrompt2)),
        PromptTemplate::make("CaseStructuring", std::string(kPrompt3)),
        PromptTemplate::make("TaskListInitial", std::string(kPrompt4)),
        PromptTemplate::make("TaskListIterative", std::string(kPrompt5)),
    };
    return templates.at(static_cast<std::size_t>(id));
}

std::string render_prompt(const PromptTemplate& tmpl, const Bindings& bindings) {
    for (const auto& name : tmpl.placeholders)
        if (!bindings.contains(name)) throw MissingBinding(name);
    for (const auto& [name, value] : bindings)
        if (!tmpl.placeholders.contains(name)) throw UnknownPlaceholder(name);

    std::string out;
    out.reserve(tmpl.body.size() + 256);
    auto begin = tmpl.body.cbegin();
    auto last = begin;
    for (auto it = std::sregex_iterator(begin, tmpl.body.cend(), placeholder_re()); it != std::sregex_iterator(); ++it) {
        const auto& m = *it;
        out.append(last, m[0].first);
        out += bindings.find(m[1].str())->second;
        last = m[0].second;
    }
    out.append(last, tmpl.body.cend());
    return out;
}

}  // namespace epiplan::model
