#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "epiplan/common/json.hpp"
#include "epiplan/condlang/condition.hpp"
#include "epiplan/modelclient/backend.hpp"
#include "epiplan/modelclient/scenario.hpp"

namespace epiplan::model {

// A deterministic stand-in for the language model, answering each built-in
// prompt by rule:
//   1  longest candidate name (or its first word, 4+ letters) found in the
//      report, ties to the lexicographically smallest candidate;
//   2  the atoms of the listed trigger conditions;
//   3  Yes/No/Unknown per point from the scenario's facts;
//   4/5 candidates whose trigger is Yes under the structured case, Unknown
//      counting as No; 5 also drops actions listed as completed.
class RuleBasedMock : public ModelBackend {
public:
    explicit RuleBasedMock(std::vector<Scenario> scenarios = {}) : scenarios_(std::move(scenarios)) {}

    std::string id() const override { return "mock"; }
    std::string generate(const ModelRequest& request) override;

    const std::vector<Scenario>& scenarios() const { return scenarios_; }

private:
    std::vector<Scenario> scenarios_;
};

std::optional<std::string> match_epidemic_type(std::span<const std::string> candidates, std::string_view report);

struct Fact {
    std::string text;
    bool negative = false;  // stated as absent regardless of wording
};

// Facts behind a report: the matching scenario's facts and negations, or
// the report's own sentences when no scenario matches, followed by any
// Field Findings lines.
std::vector<Fact> facts_for_report(const std::vector<Scenario>& scenarios, std::string_view report);

// Verdict of the last fact mentioning the point; No when that mention is
// negated ("no ..."/"not ..."), Unknown when nothing mentions it.
cond::Truth judge_point(std::string_view point, std::span<const Fact> facts);

// Position of `point` in canonical `text` at word boundaries, allowing a
// plural "s"/"es" suffix. npos when absent.
std::size_t find_point(std::string_view text, std::string_view point, std::size_t from = 0);

}  // namespace epiplan::model
