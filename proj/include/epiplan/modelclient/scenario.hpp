#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "epiplan/common/json.hpp"
#include "epiplan/knowledge/knowledge_base.hpp"

namespace epiplan::model {

// Header of the report section that carries facts learned from feedback.
// Each following "- " line is one fact.
inline constexpr std::string_view kFieldFindingsHeader = "Field Findings:";

struct FeedbackItemSpec {
    std::optional<std::size_t> index;  // 0-based into the previous round
    std::string action;                // used when index is absent
    std::string status;
    std::string note;
};

struct FeedbackRoundSpec {
    std::string default_status = "Completed";
    std::vector<FeedbackItemSpec> items;
    std::vector<std::string> new_facts;
};

struct Checklist {
    std::vector<std::string> required_actions;
    // canonical action name -> accepted alternative names
    std::map<std::string, std::vector<std::string>> synonyms;
};

struct Scenario {
    std::string id;
    std::string disease;
    std::string disease_type;
    kb::RiskLevel risk_level = kb::RiskLevel::A;
    std::string report;
    std::string basic_case_info;
    std::string risk_case_info;
    std::vector<std::string> facts;
    std::vector<std::string> negations;
    std::vector<FeedbackRoundSpec> feedback_rounds;
    Checklist checklist;
};

FeedbackRoundSpec feedback_round_from_json(const Json& j);
Scenario scenario_from_json(const Json& j);
Json to_json(const Scenario& s);

// Every *.json file in `dir`, ordered by id.
std::vector<Scenario> load_scenarios(const std::filesystem::path& dir);
Scenario load_scenario(const std::filesystem::path& file);

// Scenario whose report text occurs in `report` (case and whitespace
// insensitive). Longest report wins when several do.
const Scenario* find_scenario_for_report(const std::vector<Scenario>& scenarios, std::string_view report);

// The "- " lines under kFieldFindingsHeader, trimmed.
std::vector<std::string> field_findings(std::string_view report);

// `report` with a Field Findings section appended when `findings` is non-empty.
std::string with_field_findings(const std::string& report, const std::vector<std::string>& findings);

}  // namespace epiplan::model
