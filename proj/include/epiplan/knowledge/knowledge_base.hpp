#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "epiplan/common/json.hpp"
#include "epiplan/condlang/condition.hpp"

namespace epiplan::kb {

enum class RiskLevel { A, B, C, D };

std::optional<RiskLevel> parse_risk_level(std::string_view s);
std::string to_string(RiskLevel level);

// On-disk field names of a response-action record.
namespace field {
inline constexpr std::string_view action = "Action";
inline constexpr std::string_view trigger_condition = "Trigger Condition";
inline constexpr std::string_view work_requirement = "Work Requirement";
inline constexpr std::string_view work_requirements = "Work Requirements";
inline constexpr std::string_view responsible_ab = "Responsible Party A/B";
inline constexpr std::string_view responsible_cd = "Responsible Party C/D";
inline constexpr std::string_view time_limit = "Time Limit";
inline constexpr std::string_view termination_condition = "Termination Condition";
}  // namespace field

struct ResponseAction {
    std::string action;
    std::string trigger_condition_raw;
    cond::CondExpr trigger_condition = cond::CondExpr::atom("");
    bool trigger_degraded = false;
    std::string work_requirement;
    std::string responsible_ab;
    std::string responsible_cd;
    std::string time_limit;
    std::string termination_condition;
    // The published listing spells the field "Work Requirements"; keep
    // whichever spelling the record used so re-serialisation is faithful.
    bool plural_work_field = false;
};

Json to_json(const ResponseAction& action);

/// One validation failure. `index` is empty for file-level problems.
struct MalformedRecord {
    std::string file;
    std::optional<std::size_t> index;
    std::string field;
    std::string rule;

    Json to_json() const;
    std::string describe() const;
};

/// Validates a single record object. Violations are appended to `out`;
/// returns the record only when it produced none.
std::optional<ResponseAction> parse_response_action(const Json& record, const std::string& file,
                                                    std::optional<std::size_t> index,
                                                    std::vector<MalformedRecord>& out);

struct DiseaseKB {
    std::string disease;
    std::vector<ResponseAction> actions;
    std::string source;
};

class UnknownDisease : public std::runtime_error {
public:
    explicit UnknownDisease(std::string disease)
        : std::runtime_error("disease not in knowledge base: " + disease), disease_(std::move(disease)) {}
    const std::string& disease() const { return disease_; }

private:
    std::string disease_;
};

/// Immutable once built; keyed by canonical disease name, display form kept.
class KnowledgeBase {
public:
    // Throws std::invalid_argument on an empty/duplicate disease or no actions.
    void add(DiseaseKB disease);

    const DiseaseKB* find(std::string_view disease) const;
    bool empty() const { return by_key_.empty(); }
    std::size_t size() const { return by_key_.size(); }

    const std::map<std::string, DiseaseKB>& entries() const { return by_key_; }

private:
    std::map<std::string, DiseaseKB> by_key_;
};

class KnowledgeBaseError : public std::runtime_error {
public:
    explicit KnowledgeBaseError(std::vector<MalformedRecord> violations);
    const std::vector<MalformedRecord>& violations() const { return violations_; }

private:
    std::vector<MalformedRecord> violations_;
};

enum class LoadMode { Strict, Lenient };

struct KnowledgeBaseScan {
    KnowledgeBase kb;  // valid records only
    std::vector<MalformedRecord> violations;
    std::vector<std::string> warnings;
};

/// Reads every *.json file in `dir` (sorted by name). A file is either an
/// array of records, named by its stem, or {"disease": ..., "actions": [...]}.
/// Never throws for content problems; throws std::runtime_error if `dir`
/// is not a directory.
KnowledgeBaseScan scan_knowledge_base(const std::filesystem::path& dir);

/// Strict mode throws KnowledgeBaseError listing every violation; lenient
/// mode logs and skips invalid records.
KnowledgeBase load_knowledge_base(const std::filesystem::path& dir, LoadMode mode = LoadMode::Strict);

/// Writes one `<disease>.json` array per disease.
void write_knowledge_base(const KnowledgeBase& kb, const std::filesystem::path& dir);

/// Display names in lexicographic order.
std::vector<std::string> list_diseases(const KnowledgeBase& kb);

/// Exact lookup on the canonical disease key. Throws UnknownDisease.
const std::vector<ResponseAction>& retrieve_candidate_plans(const KnowledgeBase& kb, std::string_view disease);

/// Atomic condition points across all trigger conditions, in order.
std::vector<std::string> extract_condition_points(std::span<const ResponseAction> actions);

const std::string& select_responsible_party(const ResponseAction& action, RiskLevel level);

}  // namespace epiplan::kb
