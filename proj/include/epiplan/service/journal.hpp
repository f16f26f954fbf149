#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "epiplan/common/json.hpp"

namespace epiplan::service {

enum class EventType { SessionCreated, RoundGenerated, FeedbackRecorded, SessionClosed };
std::string_view to_string(EventType t);
EventType event_type_from_string(std::string_view s);

struct JournalEvent {
    std::uint64_t seq = 0;  // assigned by the store, strictly increasing
    EventType type = EventType::SessionCreated;
    std::string session;
    std::string at;  // ISO-8601 UTC
    Json payload;
};

Json to_json(const JournalEvent& e);
JournalEvent event_from_json(const Json& j);

class JournalStore {
public:
    virtual ~JournalStore() = default;
    // Durable once this returns. Sets e.seq.
    virtual void append(JournalEvent& e) = 0;
    virtual std::vector<JournalEvent> load() = 0;
};

// JSON lines, fsync'd after every append. A final line cut short by a crash
// is dropped on load (with a warning) and truncated away before the next
// append; a damaged line anywhere else is an error.
class FileJournal : public JournalStore {
public:
    explicit FileJournal(std::filesystem::path path);
    ~FileJournal() override;
    FileJournal(const FileJournal&) = delete;
    FileJournal& operator=(const FileJournal&) = delete;

    void append(JournalEvent& e) override;
    std::vector<JournalEvent> load() override;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    std::mutex mu_;
    int fd_ = -1;
    std::uint64_t last_seq_ = 0;
};

class MemoryJournal : public JournalStore {
public:
    void append(JournalEvent& e) override;
    std::vector<JournalEvent> load() override;

private:
    std::mutex mu_;
    std::vector<JournalEvent> events_;
};

}  // namespace epiplan::service
