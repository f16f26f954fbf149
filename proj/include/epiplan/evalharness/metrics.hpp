#pragma once

#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "epiplan/common/json.hpp"
#include "epiplan/modelclient/scenario.hpp"
#include "epiplan/pipeline/types.hpp"

namespace epiplan::eval {

struct GoldChecklist {
    std::string disease;
    std::string scenario_id;
    std::vector<std::string> required_actions;
    // required action (any spelling) -> accepted alternative names
    std::map<std::string, std::vector<std::string>> synonyms;
};

// Throws std::invalid_argument when the scenario's list is empty or repeats
// an action.
GoldChecklist checklist_for(const model::Scenario& scenario);

struct ScoreReport {
    double completeness = 0;  // 100 * hits / required
    std::vector<std::string> hits;    // required actions present, checklist order
    std::vector<std::string> misses;  // required actions absent, checklist order
    std::vector<std::string> extras;  // generated actions nobody required, first-seen order
};

Json to_json(const ScoreReport& r);

// Canonical exact match on action names, widened by the checklist's
// synonyms. Extra actions never lower the score.
ScoreReport completeness_score(std::span<const pipeline::TaskItem> items, const GoldChecklist& checklist);

class ConstantVector : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class LengthMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct Correlation {
    double r = 0;
    std::size_t n = 0;
};

// Sample Pearson correlation, accumulated in one pass (Welford co-moments).
// Needs equal lengths of at least 3 and neither vector constant.
Correlation pearson_r(std::span<const double> xs, std::span<const double> ys);

struct MeanSd {
    std::size_t n = 0;
    double mean = 0;
    double sd = 0;  // sample (n - 1) convention; 0 when n == 1
};

MeanSd mean_sd(std::span<const double> values);

}  // namespace epiplan::eval
