#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "epiplan/common/json.hpp"
#include "epiplan/knowledge/knowledge_base.hpp"
#include "epiplan/modelclient/backend.hpp"
#include "epiplan/pipeline/planner.hpp"
#include "epiplan/service/journal.hpp"

namespace epiplan::service {

// Machine codes an error response may carry, with their HTTP status.
struct ErrorCode {
    std::string_view code;
    int status;
};
const std::vector<ErrorCode>& error_codes();

class ApiError : public std::runtime_error {
public:
    // Throws std::invalid_argument for a code outside error_codes().
    ApiError(std::string_view code, const std::string& message);

    int status() const { return status_; }
    const std::string& code() const { return code_; }
    Json body() const;  // {"error": {"code", "message"}}

private:
    std::string code_;
    int status_;
};

// Translates whatever a service call threw. Never throws.
ApiError to_api_error(std::exception_ptr error);

struct ServiceOptions {
    pipeline::PlannerOptions planner;
    std::function<std::string()> clock = pipeline::iso_timestamp_now;
};

// Sessions over a journal. Every state change is appended (and durable)
// before it becomes visible; construction replays the journal without
// calling the model. Writes to one session are serialized: a second writer
// arriving while one is running gets ApiError session_busy instead of
// waiting. Reads never wait for a running write.
class SessionService {
public:
    SessionService(const kb::KnowledgeBase& kb, model::ModelBackend& backend, std::unique_ptr<JournalStore> journal,
                   ServiceOptions options = {});

    // All of these throw ApiError only.
    Json create_session(const Json& report);  // {id, disease, condition_points, structured_case}
    Json generate_round(const std::string& id);  // the new task list with grounding
    Json post_feedback(const std::string& id, const Json& feedback);  // session snapshot
    Json close_session(const std::string& id);  // session snapshot
    Json get_session(const std::string& id) const;
    Json list_sessions() const;  // [{id, disease, status, rounds}]
    Json kb_diseases() const;
    Json kb_actions(std::string_view disease) const;

    std::size_t session_count() const;

private:
    struct Entry {
        std::mutex write_mu;          // held for a whole mutation
        mutable std::mutex state_mu;  // guards `session`
        pipeline::PlanningSession session;
    };

    template <typename F>
    Json mutate(const std::string& id, F&& f);

    std::shared_ptr<Entry> find(const std::string& id) const;
    void replay();
    void append(EventType type, const std::string& session, Json payload);

    const kb::KnowledgeBase& kb_;
    pipeline::Planner planner_;
    std::unique_ptr<JournalStore> journal_;
    ServiceOptions options_;

    mutable std::shared_mutex map_mu_;
    std::map<std::string, std::shared_ptr<Entry>> sessions_;
    std::uint64_t next_id_ = 1;
};

}  // namespace epiplan::service
