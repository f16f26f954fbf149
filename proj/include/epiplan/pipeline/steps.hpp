#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "epiplan/knowledge/knowledge_base.hpp"
#include "epiplan/modelclient/backend.hpp"
#include "epiplan/pipeline/types.hpp"

namespace epiplan::pipeline {

// Interpreting model output. Every failure here is retryable: another
// sample from the model may well be usable.

// {"Epidemic Type": name} -> the knowledge base's display name for it.
// Throws UnrecognizedDisease.
std::string resolve_epidemic_type(const Json& answer, const kb::KnowledgeBase& kb);

// Canonical, deduplicated list items. Throws NoConditionPoints when empty.
std::vector<std::string> parse_condition_points(std::string_view text);

// "point: verdict" lines. Throws UnparseableStructuring when there are none.
std::vector<model::CaseLine> parse_verdicts(std::string_view text);

// One line per requested point, in request order; points the model skipped
// are Unknown and lines for points nobody asked about are dropped.
StructuredCase complete_structured_case(std::span<const std::string> points, std::span<const model::CaseLine> verdicts);

// A JSON array of task objects anywhere in `text`. Throws NoJsonFound,
// ModelOutputNotArray or MalformedTaskItem.
std::vector<TaskItem> parse_task_list(std::string_view text);

// Direct single-step calls, each retrying retryable failures `retries`
// more times before giving up with the last error.

std::string identify_epidemic_type(std::string_view report, const kb::KnowledgeBase& kb, model::ModelBackend& backend,
                                   int retries = 1);

// Condition points the model extracts from the plans' trigger conditions.
std::vector<std::string> model_condition_points(std::span<const kb::ResponseAction> plans, model::ModelBackend& backend,
                                                int retries = 1);

// Throws std::invalid_argument before calling the model when `points` is empty.
StructuredCase structure_case(std::string_view report, std::span<const std::string> points,
                              model::ModelBackend& backend, int retries = 1);

}  // namespace epiplan::pipeline
