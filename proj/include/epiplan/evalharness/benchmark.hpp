#pragma once

#include <map>
#include <vector>

#include "epiplan/evalharness/summary.hpp"
#include "epiplan/knowledge/knowledge_base.hpp"
#include "epiplan/modelclient/backend.hpp"
#include "epiplan/modelclient/scenario.hpp"
#include "epiplan/pipeline/planner.hpp"

namespace epiplan::eval {

struct BenchmarkOptions {
    std::size_t workers = 1;  // scenarios run concurrently; the backend must allow it
    pipeline::PlannerOptions planner;
};

// Runs two rounds per scenario (the second after the scenario's first
// scripted feedback round, or all-Completed feedback when it has none),
// timing each round and scoring it. A scenario whose pipeline throws is
// kept as a Failed row. Throws std::invalid_argument up front when a
// scenario lacks a usable checklist.
BenchmarkSummary run_benchmark(const std::vector<model::Scenario>& scenarios, const kb::KnowledgeBase& kb,
                               model::ModelBackend& backend, const BenchmarkOptions& options = {});

ScenarioRow run_scenario(const model::Scenario& scenario, const GoldChecklist& checklist, const kb::KnowledgeBase& kb,
                         model::ModelBackend& backend, const pipeline::PlannerOptions& options = {});

// The summary plus a header with the backend id and the human-study
// reference values this harness cannot reproduce.
Json benchmark_report(const BenchmarkSummary& summary, const std::string& backend_id);

// Correlation of each scored scenario's final completeness with an
// external rating keyed by scenario id. Unrated scenarios are skipped.
Correlation rating_correlation(const BenchmarkSummary& summary, const std::map<std::string, double>& ratings);

}  // namespace epiplan::eval
