#include "epiplan/service/journal.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <system_error>

#include <spdlog/spdlog.h>

namespace epiplan::service {

namespace {

constexpr EventType kAllTypes[] = {EventType::SessionCreated, EventType::RoundGenerated, EventType::FeedbackRecorded,
                                   EventType::SessionClosed};

[[noreturn]] void throw_errno(const std::string& what) { throw std::system_error(errno, std::generic_category(), what); }

struct Scan {
    std::vector<JournalEvent> events;
    std::uintmax_t good_bytes = 0;  // length of the intact prefix
};

Scan scan_file(const std::filesystem::path& path) {
    Scan scan;
    std::ifstream in(path, std::ios::binary);
    if (!in) return scan;
    std::string content((std::istreambuf_iterator<char>(in)), {});
    std::size_t pos = 0;
    std::uint64_t last = 0;
    while (pos < content.size()) {
        const auto nl = content.find('\n', pos);
        if (nl == std::string::npos) {
            spdlog::warn("journal {}: dropping incomplete final record ({} bytes)", path.string(), content.size() - pos);
            break;
        }
        Json j = Json::parse(std::string_view(content).substr(pos, nl - pos), nullptr, false);
        if (j.is_discarded()) {
            if (nl + 1 != content.size())
                throw std::runtime_error("journal " + path.string() + ": damaged record at byte " + std::to_string(pos));
            spdlog::warn("journal {}: dropping unreadable final record", path.string());
            break;
        }
        auto e = event_from_json(j);
        if (e.seq <= last)
            throw std::runtime_error("journal " + path.string() + ": sequence " + std::to_string(e.seq) +
                                     " does not follow " + std::to_string(last));
        last = e.seq;
        scan.events.push_back(std::move(e));
        pos = nl + 1;
        scan.good_bytes = pos;
    }
    return scan;
}

}  // namespace

std::string_view to_string(EventType t) {
    switch (t) {
        case EventType::SessionCreated: return "SessionCreated";
        case EventType::RoundGenerated: return "RoundGenerated";
        case EventType::FeedbackRecorded: return "FeedbackRecorded";
        case EventType::SessionClosed: return "SessionClosed";
    }
    return "?";
}

EventType event_type_from_string(std::string_view s) {
    for (auto t : kAllTypes)
        if (to_string(t) == s) return t;
    throw std::invalid_argument("unknown journal event type: " + std::string(s));
}

Json to_json(const JournalEvent& e) {
    Json j;
    j["seq"] = e.seq;
    j["type"] = to_string(e.type);
    j["session"] = e.session;
    j["at"] = e.at;
    j["payload"] = e.payload;
    return j;
}

JournalEvent event_from_json(const Json& j) {
    if (!j.is_object()) throw std::invalid_argument("journal event is not an object");
    JournalEvent e;
    e.seq = j.at("seq").get<std::uint64_t>();
    e.type = event_type_from_string(j.at("type").get<std::string>());
    e.session = j.at("session").get<std::string>();
    e.at = j.value("at", "");
    e.payload = j.value("payload", Json::object());
    return e;
}

FileJournal::FileJournal(std::filesystem::path path) : path_(std::move(path)) {
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
    auto scan = scan_file(path_);
    if (!scan.events.empty()) last_seq_ = scan.events.back().seq;
    fd_ = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd_ < 0) throw_errno("open " + path_.string());
    if (::ftruncate(fd_, static_cast<off_t>(scan.good_bytes)) != 0) throw_errno("truncate " + path_.string());
}

FileJournal::~FileJournal() {
    if (fd_ >= 0) ::close(fd_);
}

void FileJournal::append(JournalEvent& e) {
    std::lock_guard lock(mu_);
    e.seq = last_seq_ + 1;
    const std::string line = to_json(e).dump() + "\n";
    std::size_t done = 0;
    while (done < line.size()) {
        auto n = ::write(fd_, line.data() + done, line.size() - done);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw_errno("append to " + path_.string());
        }
        done += static_cast<std::size_t>(n);
    }
    if (::fsync(fd_) != 0) throw_errno("fsync " + path_.string());
    last_seq_ = e.seq;
}

std::vector<JournalEvent> FileJournal::load() {
    std::lock_guard lock(mu_);
    return scan_file(path_).events;
}

void MemoryJournal::append(JournalEvent& e) {
    std::lock_guard lock(mu_);
    e.seq = events_.empty() ? 1 : events_.back().seq + 1;
    events_.push_back(e);
}

std::vector<JournalEvent> MemoryJournal::load() {
    std::lock_guard lock(mu_);
    return events_;
}

}  // namespace epiplan::service
