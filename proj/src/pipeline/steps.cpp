#include "epiplan/pipeline/steps.hpp"

#include <set>
#include <stdexcept>

#include "epiplan/common/text.hpp"
#include "epiplan/modelclient/json_extract.hpp"
#include "epiplan/modelclient/text_lists.hpp"
#include "epiplan/pipeline/errors.hpp"

namespace epiplan::pipeline {

namespace {

template <typename F>
auto with_retries(int retries, F&& f) {
    for (int attempt = 0;; ++attempt) {
        try {
            return f();
        } catch (const RetryableError&) {
            if (attempt >= retries) throw;
        }
    }
}

}  // namespace

std::string resolve_epidemic_type(const Json& answer, const kb::KnowledgeBase& kb) {
    if (!answer.is_object() || !answer.contains("Epidemic Type") || !answer["Epidemic Type"].is_string())
        throw UnrecognizedDisease(answer.dump());
    const auto name = answer["Epidemic Type"].get<std::string>();
    const auto* entry = kb.find(name);
    if (entry == nullptr) throw UnrecognizedDisease(name);
    return entry->disease;
}

std::vector<std::string> parse_condition_points(std::string_view text) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& item : model::parse_list_items(text)) {
        auto point = text::canonical(item);
        if (!point.empty() && seen.insert(point).second) out.push_back(std::move(point));
    }
    if (out.empty()) throw NoConditionPoints("model output lists no condition points");
    return out;
}

std::vector<model::CaseLine> parse_verdicts(std::string_view text) {
    auto lines = model::parse_structured_case(text);
    if (lines.empty()) throw UnparseableStructuring("no \"point: verdict\" lines in model output");
    return lines;
}

StructuredCase complete_structured_case(std::span<const std::string> points, std::span<const model::CaseLine> verdicts) {
    StructuredCase c;
    std::set<std::string> seen;
    for (const auto& p : points) {
        auto point = text::canonical(p);
        if (!seen.insert(point).second) continue;
        auto truth = cond::Truth::Unknown;
        for (const auto& [q, t] : verdicts)
            if (q == point) truth = t;
        c.lines.emplace_back(std::move(point), truth);
    }
    return c;
}

std::vector<TaskItem> parse_task_list(std::string_view text) {
    const Json value = model::extract_json_value(text);
    if (!value.is_array()) throw ModelOutputNotArray("task list output is a JSON " + std::string(value.type_name()));
    std::vector<TaskItem> items;
    for (const auto& v : value) items.push_back(task_item_from_json(v));
    return items;
}

std::string identify_epidemic_type(std::string_view report, const kb::KnowledgeBase& kb, model::ModelBackend& backend,
                                   int retries) {
    if (kb.empty()) throw std::invalid_argument("knowledge base is empty");
    auto req = model::make_request(model::TemplateId::EpidemicTypeExtraction,
                                   {{"candidate_epidemic_types", model::render_slot(kb::list_diseases(kb))},
                                    {"epidemic_reporting_information", std::string(report)}});
    return with_retries(retries, [&] {
        return resolve_epidemic_type(model::extract_json_value(model::complete(backend, req).text), kb);
    });
}

std::vector<std::string> model_condition_points(std::span<const kb::ResponseAction> plans, model::ModelBackend& backend,
                                                int retries) {
    std::vector<std::string> triggers;
    std::set<std::string> seen;
    for (const auto& p : plans)
        if (seen.insert(p.trigger_condition_raw).second) triggers.push_back(p.trigger_condition_raw);
    auto req = model::make_request(model::TemplateId::ExtractConditionPoints,
                                   {{"all_trigger_conditions", model::render_numbered_list(triggers)}});
    return with_retries(retries, [&] { return parse_condition_points(model::complete(backend, req).text); });
}

StructuredCase structure_case(std::string_view report, std::span<const std::string> points,
                              model::ModelBackend& backend, int retries) {
    if (points.empty()) throw std::invalid_argument("no condition points to structure");
    const std::vector<std::string> list(points.begin(), points.end());
    auto req = model::make_request(model::TemplateId::CaseStructuring,
                                   {{"condition_points", model::render_numbered_list(list)},
                                    {"epidemic_reporting_information", std::string(report)}});
    return with_retries(retries, [&] {
        auto verdicts = parse_verdicts(model::complete(backend, req).text);
        return complete_structured_case(points, verdicts);
    });
}

}  // namespace epiplan::pipeline
