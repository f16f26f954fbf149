#pragma once

#include <span>

#include "epiplan/knowledge/knowledge_base.hpp"
#include "epiplan/pipeline/types.hpp"

namespace epiplan::pipeline {

// Links each item to a candidate record by canonical action name. When
// several records share the name, the one whose work requirement matches
// wins, then one whose party and time limit match, then the first. Items
// with no such record are Hallucinated; linked items are checked against
// the record's party for `level` and its time limit. Nothing is dropped.
GroundingReport ground_task_list(std::span<const TaskItem> items, std::span<const kb::ResponseAction> plans,
                                 kb::RiskLevel level);

}  // namespace epiplan::pipeline
