#include "epiplan/pipeline/workflow.hpp"

#include <set>

#include "epiplan/modelclient/json_extract.hpp"
#include "epiplan/modelclient/text_lists.hpp"
#include "epiplan/pipeline/steps.hpp"

namespace epiplan::pipeline {

namespace {

flow::NodeSpec make_node(const char* id, flow::NodeKind kind, Json params) {
    return flow::NodeSpec{id, kind, std::move(params)};
}

std::vector<std::string> strings_of(const Json& array) {
    std::vector<std::string> out;
    for (const auto& v : array) out.push_back(v.get<std::string>());
    return out;
}

}  // namespace

flow::FlowGraph build_plan_workflow() {
    using flow::NodeKind;
    flow::FlowGraph g;
    g.entry_inputs = {"report", "risk_cases", "basic_case_information", "previous_task_feedback"};
    g.nodes = {
        make_node(node::list_diseases, NodeKind::Code, {{"function", "list_diseases"}}),
        make_node(node::identify, NodeKind::Model, {{"template", "EpidemicTypeExtraction"}, {"parser", "epidemic_type"}}),
        make_node(node::retrieve, NodeKind::Rag, {{"key_slot", "disease"}}),
        make_node(node::triggers, NodeKind::Code, {{"function", "extract_trigger_conditions"}}),
        make_node(node::points, NodeKind::Model, {{"template", "ExtractConditionPoints"}, {"parser", "condition_points"}}),
        make_node(node::structure, NodeKind::Model, {{"template", "CaseStructuring"}, {"parser", "verdicts"}}),
        make_node(node::complete, NodeKind::Code, {{"function", "complete_structured_case"}}),
        make_node(node::select, NodeKind::Branch,
                  {{"predicate", "feedback_present"},
                   {"outcomes", {{"initial", {node::initial}}, {"iterative", {node::iterative}}}}}),
        make_node(node::initial, NodeKind::Model, {{"template", "TaskListInitial"}, {"parser", "task_list"}}),
        make_node(node::iterative, NodeKind::Model, {{"template", "TaskListIterative"}, {"parser", "task_list"}}),
    };
    g.edges = {
        {node::list_diseases, node::identify, "candidate_epidemic_types"},
        {"$report", node::identify, "epidemic_reporting_information"},
        {node::identify, node::retrieve, "disease"},
        {node::retrieve, node::triggers, "plans"},
        {node::triggers, node::points, "all_trigger_conditions"},
        {node::points, node::structure, "condition_points"},
        {"$report", node::structure, "epidemic_reporting_information"},
        {node::points, node::complete, "points"},
        {node::structure, node::complete, "verdicts"},
        {"$previous_task_feedback", node::select, "feedback"},
    };
    for (const char* gen : {node::initial, node::iterative}) {
        g.edges.push_back({"$risk_cases", gen, "risk_cases"});
        g.edges.push_back({"$basic_case_information", gen, "basic_case_information"});
        g.edges.push_back({node::complete, gen, "structured_info"});
        g.edges.push_back({node::retrieve, gen, "candidate_plans"});
    }
    g.edges.push_back({"$previous_task_feedback", node::iterative, "previous_task_feedback"});
    g.outputs = {
        {"disease", node::identify},
        {"candidate_plans", node::retrieve},
        {"condition_points", node::points},
        {"structured_case", node::complete},
        {"initial_tasks", node::initial},
        {"iterative_tasks", node::iterative},
    };
    return g;
}

flow::Registry make_plan_registry(const kb::KnowledgeBase& kb, model::ModelBackend& backend) {
    flow::Registry r;
    r.kb = &kb;
    r.backend = &backend;

    r.functions["list_diseases"] = [&kb](const flow::SlotValues&) { return Json(kb::list_diseases(kb)); };
    r.functions["extract_trigger_conditions"] = [](const flow::SlotValues& s) {
        Json out = Json::array();
        std::set<std::string> seen;
        for (const auto& plan : s.at("plans")) {
            auto trigger = plan.at("Trigger Condition").get<std::string>();
            if (seen.insert(trigger).second) out.push_back(std::move(trigger));
        }
        return out;
    };
    // Rendered as "1. point: Verdict" lines, the form the task-list prompts take.
    r.functions["complete_structured_case"] = [](const flow::SlotValues& s) {
        auto points = strings_of(s.at("points"));
        std::vector<model::CaseLine> verdicts;
        for (const auto& line : s.at("verdicts"))
            verdicts.emplace_back(line.at("point").get<std::string>(),
                                  cond::truth_from_string(line.at("verdict").get<std::string>()));
        auto c = complete_structured_case(points, verdicts);
        return Json(model::render_structured_case(c.lines));
    };
    r.predicates["feedback_present"] = [](const flow::SlotValues& s) {
        return s.at("feedback").is_null() ? std::string("initial") : std::string("iterative");
    };

    r.parsers["epidemic_type"] = [&kb](const std::string& text) {
        return Json(resolve_epidemic_type(model::extract_json_value(text), kb));
    };
    r.parsers["condition_points"] = [](const std::string& text) { return Json(parse_condition_points(text)); };
    r.parsers["verdicts"] = [](const std::string& text) {
        StructuredCase c;
        c.lines = parse_verdicts(text);
        return to_json(c);
    };
    r.parsers["task_list"] = [](const std::string& text) { return to_json(parse_task_list(text)); };
    return r;
}

}  // namespace epiplan::pipeline
