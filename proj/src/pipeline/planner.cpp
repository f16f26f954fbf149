#include "epiplan/pipeline/planner.hpp"

#include <set>

#include <spdlog/spdlog.h>

#include "epiplan/common/text.hpp"
#include "epiplan/knowledge/knowledge_base.hpp"
#include "epiplan/modelclient/json_extract.hpp"
#include "epiplan/pipeline/errors.hpp"
#include "epiplan/pipeline/grounding.hpp"
#include "epiplan/pipeline/steps.hpp"
#include "epiplan/pipeline/workflow.hpp"

namespace epiplan::pipeline {

namespace {

// Pipeline errors keep their type; anything else is reported as the node
// that failed.
[[noreturn]] void raise(const flow::NodeFailureInfo& f) {
    if (f.error) {
        try {
            std::rethrow_exception(f.error);
        } catch (const UnrecognizedDisease&) {
            throw;
        } catch (const UnparseableStructuring&) {
            throw;
        } catch (const NoConditionPoints&) {
            throw;
        } catch (const ModelOutputNotArray&) {
            throw;
        } catch (const MalformedTaskItem&) {
            throw;
        } catch (const model::NoJsonFound&) {
            throw;
        } catch (const kb::UnknownDisease&) {
            throw;
        } catch (const model::TransportError&) {
            throw;
        } catch (const model::BackendRefusal&) {
            throw;
        } catch (const flow::Timeout&) {
            throw;
        } catch (...) {
        }
    }
    throw flow::NodeFailure(f);
}

void require_open(const PlanningSession& s) {
    if (s.status == SessionStatus::Closed) throw SessionClosed(s.id);
}

}  // namespace

Planner::Planner(const kb::KnowledgeBase& kb, model::ModelBackend& backend, PlannerOptions options)
    : kb_(kb), backend_(backend), options_(std::move(options)), graph_(build_plan_workflow()),
      registry_(make_plan_registry(kb, backend)) {}

PlanningSession Planner::create_session(std::string id, EpidemicReport report) const {
    validate(report);
    if (kb_.empty()) throw std::invalid_argument("knowledge base is empty");
    PlanningSession s;
    s.id = std::move(id);
    s.report = std::move(report);
    return s;
}

void Planner::prepare(PlanningSession& session) const {
    require_open(session);
    const int retries = options_.budget.max_retries;
    auto disease = identify_epidemic_type(session.report.report_text, kb_, backend_, retries);
    const auto& plans = kb::retrieve_candidate_plans(kb_, disease);
    auto points = model_condition_points(plans, backend_, retries);
    auto structured = structure_case(model::with_field_findings(session.report.report_text, session.new_facts()), points,
                                     backend_, retries);
    session.disease = std::move(disease);
    session.condition_points = std::move(points);
    session.structured_case = std::move(structured);
}

flow::ExecutionTrace Planner::generate_task_list(PlanningSession& session) const {
    require_open(session);
    if (!session.rounds.empty() && !session.rounds.back().feedback)
        throw MissingFeedback("round " + std::to_string(session.rounds.size()) + " has no feedback yet");

    const auto facts = session.new_facts();
    flow::SlotValues inputs;
    inputs["report"] = model::with_field_findings(session.report.report_text, facts);
    inputs["risk_cases"] = risk_cases_text(session.report);
    inputs["basic_case_information"] = session.report.basic_case_info;
    inputs["previous_task_feedback"] = session.rounds.empty() ? Json(nullptr) : previous_task_feedback(session);

    auto result = flow::execute(graph_, inputs, registry_, options_.budget);
    for (const auto& rec : result.trace.records) {
        if (rec.status != flow::NodeStatus::Failed) continue;
        for (const auto& f : result.failures)
            if (f.node == rec.node) raise(f);
    }

    const auto disease = result.outputs.at("disease").get<std::string>();
    if (session.disease && text::canonical(*session.disease) != text::canonical(disease))
        throw std::runtime_error("disease identified as " + disease + " after earlier rounds identified " +
                                 *session.disease);

    TaskList list;
    list.round = static_cast<int>(session.rounds.size()) + 1;
    list.generated_at = options_.clock();
    const auto& tasks = result.outputs.contains("initial_tasks") ? result.outputs.at("initial_tasks")
                                                                 : result.outputs.at("iterative_tasks");
    for (const auto& t : tasks) list.items.push_back(task_item_from_json(t));

    StructuredCase structured;
    structured.lines = model::parse_structured_case(result.outputs.at("structured_case").get<std::string>());

    const auto& plans = kb::retrieve_candidate_plans(kb_, disease);
    list.grounding = ground_task_list(list.items, plans, session.report.risk_level);
    list.grounding.unknown_points = structured.unknown_points();

    session.disease = disease;
    session.condition_points.clear();
    for (const auto& p : result.outputs.at("condition_points")) session.condition_points.push_back(p.get<std::string>());
    session.structured_case = std::move(structured);
    session.rounds.push_back(Round{std::move(list), std::nullopt});
    return std::move(result.trace);
}

flow::ExecutionTrace Planner::advance_session(PlanningSession& session, const std::optional<Feedback>& feedback) const {
    require_open(session);
    PlanningSession next = session;
    if (feedback) {
        if (next.rounds.empty()) {
            spdlog::warn("session {}: feedback given before the first round; ignoring it", next.id);
        } else {
            record_feedback(next, *feedback);
        }
    }
    auto trace = generate_task_list(next);
    session = std::move(next);
    return trace;
}

void record_feedback(PlanningSession& session, Feedback feedback) {
    require_open(session);
    if (session.rounds.empty()) throw MissingFeedback("no round to give feedback on");
    auto& last = session.rounds.back();
    if (last.feedback)
        throw std::invalid_argument("round " + std::to_string(last.tasks.round) + " already has feedback");
    std::set<std::size_t> seen;
    for (const auto& e : feedback.entries) {
        if (e.index >= last.tasks.items.size()) throw InvalidFeedbackIndex(e.index, last.tasks.items.size());
        if (!seen.insert(e.index).second)
            throw std::invalid_argument("feedback gives item " + std::to_string(e.index) + " twice");
    }
    last.feedback = std::move(feedback);
}

void close_session(PlanningSession& session) {
    require_open(session);
    session.status = SessionStatus::Closed;
}

Json previous_task_feedback(const PlanningSession& session) {
    if (session.rounds.empty()) return nullptr;
    const auto& last = session.rounds.back();
    Json j;
    j["round"] = last.tasks.round;
    j["previous_task_list"] = to_json(last.tasks.items);
    j["feedback"] = Json::array();
    j["new_facts"] = Json::array();
    if (last.feedback) {
        for (const auto& e : last.feedback->entries) {
            const auto& item = last.tasks.items.at(e.index);
            Json f;
            f["Action"] = item.action;
            f["Work Requirement"] = item.work_requirement;
            f["Status"] = to_string(e.status);
            f["Note"] = e.note;
            j["feedback"].push_back(std::move(f));
        }
        j["new_facts"] = last.feedback->new_facts;
    }
    j["completed_actions"] = Json::array();
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& r : session.rounds) {
        if (!r.feedback) continue;
        for (const auto& e : r.feedback->entries) {
            if (e.status != FeedbackStatus::Completed) continue;
            const auto& item = r.tasks.items.at(e.index);
            if (!seen.insert({text::canonical(item.action), text::canonical(item.work_requirement)}).second) continue;
            j["completed_actions"].push_back(Json{{"Action", item.action}, {"Work Requirement", item.work_requirement}});
        }
    }
    return j;
}

Feedback scenario_feedback(const model::FeedbackRoundSpec& spec, const TaskList& previous) {
    Feedback f;
    f.new_facts = spec.new_facts;
    const auto default_status = feedback_status_from_string(spec.default_status);
    for (std::size_t i = 0; i < previous.items.size(); ++i) {
        FeedbackEntry e{i, default_status, ""};
        for (const auto& s : spec.items) {
            bool named = s.index ? *s.index == i : text::canonical(s.action) == text::canonical(previous.items[i].action);
            if (!named) continue;
            e.status = feedback_status_from_string(s.status);
            e.note = s.note;
        }
        f.entries.push_back(std::move(e));
    }
    return f;
}

EpidemicReport report_from_scenario(const model::Scenario& scenario) {
    return EpidemicReport{scenario.report, scenario.risk_level, scenario.basic_case_info, scenario.risk_case_info};
}

}  // namespace epiplan::pipeline
