#pragma once

#include <string>
#include <vector>

#include "epiplan/common/json.hpp"
#include "epiplan/evalharness/metrics.hpp"

namespace epiplan::eval {

struct RoundResult {
    std::size_t tasks = 0;
    // Against everything planned so far: a round-2 list omits work that
    // round 1 already covered and feedback marked done.
    ScoreReport score;
    double time_ms = 0;
};

struct ScenarioRow {
    std::string scenario_id;
    std::string disease;
    std::string disease_type;
    bool failed = false;
    std::string error;
    RoundResult r1;
    RoundResult r2;
};

Json to_json(const ScenarioRow& row);

struct GroupStats {
    std::string group;
    std::size_t failed = 0;
    MeanSd r1;
    MeanSd r2;
    MeanSd r1_time_ms;
    MeanSd r2_time_ms;
};

Json to_json(const GroupStats& g);

struct BenchmarkSummary {
    std::vector<ScenarioRow> rows;  // ordered by scenario id
    GroupStats overall;
    std::vector<GroupStats> by_disease;  // ordered by group name
    std::vector<GroupStats> by_type;
};

// Failed rows are counted but left out of the statistics. Throws
// std::invalid_argument when `rows` is empty.
BenchmarkSummary summarize_runs(std::vector<ScenarioRow> rows);

Json to_json(const BenchmarkSummary& s);

// "group,n,failed,r1_mean,r1_sd,r2_mean,r2_sd,r1_time_ms_mean,r2_time_ms_mean"
// with one line per disease or per disease type.
std::string disease_table_csv(const BenchmarkSummary& s);
std::string type_table_csv(const BenchmarkSummary& s);

}  // namespace epiplan::eval
