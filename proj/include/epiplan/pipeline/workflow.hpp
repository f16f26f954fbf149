#pragma once

#include "epiplan/flowgraph/graph.hpp"
#include "epiplan/flowgraph/registry.hpp"

namespace epiplan::pipeline {

// Node ids of the planning workflow.
namespace node {
inline constexpr const char* list_diseases = "list_diseases";
inline constexpr const char* identify = "identify_epidemic_type";
inline constexpr const char* retrieve = "retrieve_candidate_plans";
inline constexpr const char* triggers = "extract_trigger_conditions";
inline constexpr const char* points = "extract_condition_points";
inline constexpr const char* structure = "structure_case";
inline constexpr const char* complete = "complete_structured_case";
inline constexpr const char* select = "select_prompt";
inline constexpr const char* initial = "generate_initial";
inline constexpr const char* iterative = "generate_iterative";
}  // namespace node

// Entry inputs: report, risk_cases, basic_case_information and
// previous_task_feedback (null in round 1). Outputs: disease,
// candidate_plans, condition_points, structured_case and exactly one of
// initial_tasks / iterative_tasks.
flow::FlowGraph build_plan_workflow();

// Functions, predicate and parsers the workflow refers to. `kb` and
// `backend` must outlive the registry.
flow::Registry make_plan_registry(const kb::KnowledgeBase& kb, model::ModelBackend& backend);

}  // namespace epiplan::pipeline
