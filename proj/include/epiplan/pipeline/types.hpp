#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "epiplan/common/json.hpp"
#include "epiplan/condlang/condition.hpp"
#include "epiplan/knowledge/knowledge_base.hpp"
#include "epiplan/modelclient/text_lists.hpp"

namespace epiplan::pipeline {

struct EpidemicReport {
    std::string report_text;
    kb::RiskLevel risk_level = kb::RiskLevel::A;
    std::string basic_case_info;
    std::string risk_case_info;
};

// Throws std::invalid_argument when the report text is blank.
void validate(const EpidemicReport& report);

// What the task-list prompts receive as "Risk Cases": the level line first.
std::string risk_cases_text(const EpidemicReport& report);

Json to_json(const EpidemicReport& report);
EpidemicReport report_from_json(const Json& j);

struct StructuredCase {
    std::vector<model::CaseLine> lines;  // condition-point order, atoms unique

    cond::Truth verdict(std::string_view point) const;
    cond::TruthAssignment assignment() const;
    std::vector<std::string> unknown_points() const;
};

Json to_json(const StructuredCase& c);
StructuredCase structured_case_from_json(const Json& j);

struct TaskItem {
    std::string action;
    std::string work_requirement;
    std::string responsible_party;
    std::string time_limit;

    friend bool operator==(const TaskItem&, const TaskItem&) = default;
};

// {"Action", "Work Requirement", "Responsible Party", "Time Limit"}
Json to_json(const TaskItem& item);
// Accepts the plural "Work Requirements" spelling too. Throws
// MalformedTaskItem when a field is missing, not a string, or blank.
TaskItem task_item_from_json(const Json& j);
Json to_json(const std::vector<TaskItem>& items);

enum class GroundingFlag { Hallucinated, PartyMismatch, TimeLimitMismatch };
std::string_view to_string(GroundingFlag f);
GroundingFlag grounding_flag_from_string(std::string_view s);

struct ItemGrounding {
    std::optional<std::size_t> record;  // index into the candidate plans
    std::vector<GroundingFlag> flags;
};

struct GroundingReport {
    std::vector<ItemGrounding> items;
    // Points the structured case left Unknown; they gated as No.
    std::vector<std::string> unknown_points;

    std::size_t count(GroundingFlag f) const;
    bool clean() const;
};

Json to_json(const GroundingReport& g);
GroundingReport grounding_from_json(const Json& j);

struct TaskList {
    int round = 1;
    std::vector<TaskItem> items;
    std::string generated_at;  // ISO-8601 UTC
    GroundingReport grounding;
};

Json to_json(const TaskList& list, bool with_timestamp = true);
TaskList task_list_from_json(const Json& j);

enum class FeedbackStatus { Completed, InProgress, Blocked };
std::string_view to_string(FeedbackStatus s);
// Case-insensitive; "In Progress" and "in_progress" are accepted too.
// Throws std::invalid_argument.
FeedbackStatus feedback_status_from_string(std::string_view s);

struct FeedbackEntry {
    std::size_t index = 0;  // into the round the feedback is about
    FeedbackStatus status = FeedbackStatus::Completed;
    std::string note;
};

struct Feedback {
    std::vector<FeedbackEntry> entries;
    std::vector<std::string> new_facts;
};

Json to_json(const Feedback& f);
Feedback feedback_from_json(const Json& j);

struct Round {
    TaskList tasks;
    std::optional<Feedback> feedback;
};

enum class SessionStatus { Open, Closed };
std::string_view to_string(SessionStatus s);

struct PlanningSession {
    std::string id;
    EpidemicReport report;
    std::optional<std::string> disease;
    std::vector<std::string> condition_points;
    StructuredCase structured_case;
    std::vector<Round> rounds;
    SessionStatus status = SessionStatus::Open;

    // Every new fact from feedback so far, in submission order.
    std::vector<std::string> new_facts() const;
};

Json to_json(const PlanningSession& s, bool with_timestamps = true);
PlanningSession session_from_json(const Json& j);

std::string iso_timestamp_now();

}  // namespace epiplan::pipeline
