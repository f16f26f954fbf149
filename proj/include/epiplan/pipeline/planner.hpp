#pragma once

#include <functional>
#include <optional>
#include <string>

#include "epiplan/flowgraph/executor.hpp"
#include "epiplan/knowledge/knowledge_base.hpp"
#include "epiplan/modelclient/backend.hpp"
#include "epiplan/modelclient/scenario.hpp"
#include "epiplan/pipeline/types.hpp"

namespace epiplan::pipeline {

struct PlannerOptions {
    // One retry per node: enough for a malformed answer or a dropped
    // connection without multiplying the cost of a bad model.
    flow::Budget budget{4, std::chrono::milliseconds(120'000), 1};
    std::function<std::string()> clock = iso_timestamp_now;
};

class Planner {
public:
    Planner(const kb::KnowledgeBase& kb, model::ModelBackend& backend, PlannerOptions options = {});

    // Validates the report; does not call the model.
    PlanningSession create_session(std::string id, EpidemicReport report) const;

    // Identifies the disease and structures the case up front with direct
    // model calls, so a new session can be inspected before any round.
    // Rounds recompute all of this. Throws like generate_task_list.
    void prepare(PlanningSession& session) const;

    // Runs the whole workflow for the next round and appends it. Facts from
    // all feedback so far are added to the report as Field Findings, so the
    // case is structured afresh every round. The session is untouched when
    // this throws. Throws SessionClosed, MissingFeedback, the pipeline's
    // model-output errors after the retry budget, or flow::NodeFailure.
    flow::ExecutionTrace generate_task_list(PlanningSession& session) const;

    // Records `feedback` on the latest round, then generates the next one.
    // On a session without rounds any feedback is ignored with a warning.
    flow::ExecutionTrace advance_session(PlanningSession& session, const std::optional<Feedback>& feedback) const;

    const flow::FlowGraph& workflow() const { return graph_; }
    const kb::KnowledgeBase& knowledge_base() const { return kb_; }
    model::ModelBackend& backend() const { return backend_; }

private:
    const kb::KnowledgeBase& kb_;
    model::ModelBackend& backend_;
    PlannerOptions options_;
    flow::FlowGraph graph_;
    flow::Registry registry_;
};

// Throws SessionClosed, MissingFeedback when there is no round to comment
// on, InvalidFeedbackIndex, or std::invalid_argument for a round that
// already has feedback or an index given twice.
void record_feedback(PlanningSession& session, Feedback feedback);

void close_session(PlanningSession& session);

// The "Previous Task List and Feedback" value for the next round: the last
// list, per-item status, new facts, and every (Action, Work Requirement)
// completed in any round so far.
Json previous_task_feedback(const PlanningSession& session);

// Feedback for `previous` described by a fixture round: every item gets
// the default status unless an entry names it by index or action.
Feedback scenario_feedback(const model::FeedbackRoundSpec& spec, const TaskList& previous);

EpidemicReport report_from_scenario(const model::Scenario& scenario);

}  // namespace epiplan::pipeline
