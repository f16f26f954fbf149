#include "epiplan/service/session_service.hpp"

#include <algorithm>
#include <charconv>

#include <spdlog/spdlog.h>

#include "epiplan/flowgraph/executor.hpp"
#include "epiplan/modelclient/json_extract.hpp"
#include "epiplan/pipeline/errors.hpp"

namespace epiplan::service {

namespace {

const std::vector<ErrorCode> kErrorCodes = {
    {"invalid_request", 400},
    {"unauthorized", 401},
    {"not_found", 404},
    {"session_closed", 409},
    {"missing_feedback", 409},
    {"feedback_exists", 409},
    {"session_busy", 409},
    {"unrecognized_disease", 422},
    {"invalid_feedback_index", 422},
    {"internal", 500},
    {"model_output_invalid", 502},
    {"backend_refused", 502},
    {"workflow_failed", 502},
    {"backend_unavailable", 503},
    {"backend_timeout", 504},
};

constexpr std::string_view kIdPrefix = "sess-";

std::uint64_t id_number(const std::string& id) {
    if (id.rfind(kIdPrefix, 0) != 0) return 0;
    std::uint64_t n = 0;
    const auto* first = id.data() + kIdPrefix.size();
    const auto* last = id.data() + id.size();
    auto [ptr, ec] = std::from_chars(first, last, n);
    return ec == std::errc() && ptr == last ? n : 0;
}

Json round_payload(const pipeline::PlanningSession& s) {
    Json j;
    j["disease"] = s.disease ? Json(*s.disease) : Json(nullptr);
    j["condition_points"] = s.condition_points;
    j["structured_case"] = to_json(s.structured_case);
    j["task_list"] = to_json(s.rounds.back().tasks);
    return j;
}

}  // namespace

const std::vector<ErrorCode>& error_codes() { return kErrorCodes; }

ApiError::ApiError(std::string_view code, const std::string& message) : std::runtime_error(message), code_(code) {
    for (const auto& c : kErrorCodes) {
        if (c.code != code) continue;
        status_ = c.status;
        return;
    }
    throw std::invalid_argument("undocumented error code: " + code_);
}

Json ApiError::body() const {
    Json j;
    j["error"]["code"] = code_;
    j["error"]["message"] = what();
    return j;
}

ApiError to_api_error(std::exception_ptr error) {
    try {
        std::rethrow_exception(error);
    } catch (const ApiError& e) {
        return e;
    } catch (const pipeline::SessionClosed& e) {
        return ApiError("session_closed", e.what());
    } catch (const pipeline::MissingFeedback& e) {
        return ApiError("missing_feedback", e.what());
    } catch (const pipeline::InvalidFeedbackIndex& e) {
        return ApiError("invalid_feedback_index", e.what());
    } catch (const pipeline::UnrecognizedDisease& e) {
        return ApiError("unrecognized_disease", e.what());
    } catch (const model::TransportError& e) {
        return ApiError("backend_unavailable", e.what());
    } catch (const flow::Timeout& e) {
        return ApiError("backend_timeout", e.what());
    } catch (const RetryableError& e) {
        // Whatever is left retryable is model output we could not use.
        return ApiError("model_output_invalid", e.what());
    } catch (const model::BackendRefusal& e) {
        return ApiError("backend_refused", e.what());
    } catch (const flow::NodeFailure& e) {
        return ApiError("workflow_failed", e.what());
    } catch (const Json::exception& e) {
        return ApiError("invalid_request", e.what());
    } catch (const std::invalid_argument& e) {
        return ApiError("invalid_request", e.what());
    } catch (const std::exception& e) {
        return ApiError("internal", e.what());
    } catch (...) {
        return ApiError("internal", "unknown error");
    }
}

SessionService::SessionService(const kb::KnowledgeBase& kb, model::ModelBackend& backend,
                               std::unique_ptr<JournalStore> journal, ServiceOptions options)
    : kb_(kb), planner_(kb, backend, options.planner), journal_(std::move(journal)), options_(std::move(options)) {
    if (!journal_) throw std::invalid_argument("session service needs a journal");
    replay();
}

void SessionService::replay() {
    std::size_t events = 0;
    for (const auto& e : journal_->load()) {
        ++events;
        if (e.type == EventType::SessionCreated) {
            auto entry = std::make_shared<Entry>();
            entry->session = pipeline::session_from_json(e.payload);
            if (entry->session.id != e.session)
                throw std::runtime_error("journal event " + std::to_string(e.seq) + " creates " + entry->session.id +
                                         " under id " + e.session);
            if (!sessions_.emplace(e.session, std::move(entry)).second)
                throw std::runtime_error("journal creates session " + e.session + " twice");
            next_id_ = std::max(next_id_, id_number(e.session) + 1);
            continue;
        }
        auto it = sessions_.find(e.session);
        if (it == sessions_.end())
            throw std::runtime_error("journal event " + std::to_string(e.seq) + " names unknown session " + e.session);
        auto& s = it->second->session;
        switch (e.type) {
            case EventType::RoundGenerated: {
                const auto& p = e.payload;
                if (!p.at("disease").is_null()) s.disease = p["disease"].get<std::string>();
                s.condition_points = p.at("condition_points").get<std::vector<std::string>>();
                s.structured_case = pipeline::structured_case_from_json(p.at("structured_case"));
                s.rounds.push_back(pipeline::Round{pipeline::task_list_from_json(p.at("task_list")), std::nullopt});
                break;
            }
            case EventType::FeedbackRecorded:
                pipeline::record_feedback(s, pipeline::feedback_from_json(e.payload));
                break;
            case EventType::SessionClosed:
                pipeline::close_session(s);
                break;
            case EventType::SessionCreated:
                break;
        }
    }
    if (events > 0) spdlog::info("replayed {} journal event(s) into {} session(s)", events, sessions_.size());
}

void SessionService::append(EventType type, const std::string& session, Json payload) {
    JournalEvent e{0, type, session, options_.clock(), std::move(payload)};
    journal_->append(e);
}

std::shared_ptr<SessionService::Entry> SessionService::find(const std::string& id) const {
    std::shared_lock lock(map_mu_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw ApiError("not_found", "no session " + id);
    return it->second;
}

template <typename F>
Json SessionService::mutate(const std::string& id, F&& f) {
    try {
        auto entry = find(id);
        std::unique_lock write(entry->write_mu, std::try_to_lock);
        if (!write.owns_lock()) throw ApiError("session_busy", "session " + id + " is being updated");
        pipeline::PlanningSession next;
        {
            std::lock_guard state(entry->state_mu);
            next = entry->session;
        }
        Json response = f(next);
        std::lock_guard state(entry->state_mu);
        entry->session = std::move(next);
        return response;
    } catch (...) {
        throw to_api_error(std::current_exception());
    }
}

Json SessionService::create_session(const Json& body) {
    try {
        auto session = planner_.create_session("", pipeline::report_from_json(body));
        planner_.prepare(session);

        auto entry = std::make_shared<Entry>();
        {
            std::unique_lock lock(map_mu_);
            session.id = std::string(kIdPrefix) + std::to_string(next_id_);
            append(EventType::SessionCreated, session.id, to_json(session));
            ++next_id_;
            entry->session = session;
            sessions_.emplace(session.id, entry);
        }
        spdlog::info("session {} created for {}", session.id, session.disease.value_or("?"));

        Json j;
        j["id"] = session.id;
        j["disease"] = session.disease ? Json(*session.disease) : Json(nullptr);
        j["condition_points"] = session.condition_points;
        j["structured_case"] = to_json(session.structured_case);
        return j;
    } catch (...) {
        throw to_api_error(std::current_exception());
    }
}

Json SessionService::generate_round(const std::string& id) {
    return mutate(id, [&](pipeline::PlanningSession& s) {
        planner_.generate_task_list(s);
        append(EventType::RoundGenerated, s.id, round_payload(s));
        const auto& list = s.rounds.back().tasks;
        spdlog::info("session {} round {}: {} task(s)", s.id, list.round, list.items.size());
        return to_json(list);
    });
}

Json SessionService::post_feedback(const std::string& id, const Json& body) {
    return mutate(id, [&](pipeline::PlanningSession& s) {
        auto feedback = pipeline::feedback_from_json(body);
        if (s.status == pipeline::SessionStatus::Open && !s.rounds.empty() && s.rounds.back().feedback)
            throw ApiError("feedback_exists", "round " + std::to_string(s.rounds.size()) + " already has feedback");
        pipeline::record_feedback(s, feedback);
        append(EventType::FeedbackRecorded, s.id, to_json(feedback));
        return to_json(s);
    });
}

Json SessionService::close_session(const std::string& id) {
    return mutate(id, [&](pipeline::PlanningSession& s) {
        pipeline::close_session(s);
        append(EventType::SessionClosed, s.id, Json::object());
        return to_json(s);
    });
}

Json SessionService::get_session(const std::string& id) const {
    try {
        auto entry = find(id);
        std::lock_guard state(entry->state_mu);
        return to_json(entry->session);
    } catch (...) {
        throw to_api_error(std::current_exception());
    }
}

Json SessionService::list_sessions() const {
    std::vector<std::shared_ptr<Entry>> entries;
    {
        std::shared_lock lock(map_mu_);
        for (const auto& [id, e] : sessions_) entries.push_back(e);
    }
    Json out = Json::array();
    for (const auto& e : entries) {
        std::lock_guard state(e->state_mu);
        const auto& s = e->session;
        Json j;
        j["id"] = s.id;
        j["disease"] = s.disease ? Json(*s.disease) : Json(nullptr);
        j["status"] = to_string(s.status);
        j["rounds"] = s.rounds.size();
        out.push_back(std::move(j));
    }
    return out;
}

Json SessionService::kb_diseases() const { return kb::list_diseases(kb_); }

Json SessionService::kb_actions(std::string_view disease) const {
    const auto* entry = kb_.find(disease);
    if (entry == nullptr) throw ApiError("not_found", "no disease " + std::string(disease) + " in the knowledge base");
    Json out = Json::array();
    for (const auto& a : entry->actions) out.push_back(kb::to_json(a));
    return out;
}

std::size_t SessionService::session_count() const {
    std::shared_lock lock(map_mu_);
    return sessions_.size();
}

}  // namespace epiplan::service
