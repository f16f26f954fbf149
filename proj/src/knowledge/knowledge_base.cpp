#include "epiplan/knowledge/knowledge_base.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "epiplan/common/text.hpp"

namespace epiplan::kb {

namespace fs = std::filesystem;

std::optional<RiskLevel> parse_risk_level(std::string_view s) {
    auto c = text::canonical(s);
    if (c == "a") return RiskLevel::A;
    if (c == "b") return RiskLevel::B;
    if (c == "c") return RiskLevel::C;
    if (c == "d") return RiskLevel::D;
    return std::nullopt;
}

std::string to_string(RiskLevel level) {
    switch (level) {
        case RiskLevel::A: return "A";
        case RiskLevel::B: return "B";
        case RiskLevel::C: return "C";
        case RiskLevel::D: return "D";
    }
    return "A";
}

Json to_json(const ResponseAction& a) {
    Json j;
    j[std::string(field::action)] = a.action;
    j[std::string(field::trigger_condition)] = a.trigger_condition_raw;
    j[std::string(a.plural_work_field ? field::work_requirements : field::work_requirement)] = a.work_requirement;
    j[std::string(field::responsible_ab)] = a.responsible_ab;
    j[std::string(field::responsible_cd)] = a.responsible_cd;
    j[std::string(field::time_limit)] = a.time_limit;
    j[std::string(field::termination_condition)] = a.termination_condition;
    return j;
}

Json MalformedRecord::to_json() const {
    Json j;
    j["file"] = file;
    j["index"] = index ? Json(*index) : Json(nullptr);
    j["field"] = field;
    j["rule"] = rule;
    return j;
}

std::string MalformedRecord::describe() const {
    std::ostringstream os;
    os << file;
    if (index) os << '[' << *index << ']';
    if (!field.empty()) os << " field \"" << field << '"';
    os << ": " << rule;
    return os.str();
}

namespace {

// Reads a string field. Returns nullopt and records a violation when the
// field is absent, not a string, or blank while required.
std::optional<std::string> string_field(const Json& rec, std::string_view name, bool nonempty,
                                        const std::string& file, std::optional<std::size_t> index,
                                        std::vector<MalformedRecord>& out) {
    auto it = rec.find(std::string(name));
    if (it == rec.end()) {
        out.push_back({file, index, std::string(name), "missing"});
        return std::nullopt;
    }
    if (!it->is_string()) {
        out.push_back({file, index, std::string(name), "not-string"});
        return std::nullopt;
    }
    auto value = it->get<std::string>();
    if (nonempty && text::trim(value).empty()) {
        out.push_back({file, index, std::string(name), "empty"});
        return std::nullopt;
    }
    return value;
}

}  // namespace

std::optional<ResponseAction> parse_response_action(const Json& rec, const std::string& file,
                                                    std::optional<std::size_t> index,
                                                    std::vector<MalformedRecord>& out) {
    if (!rec.is_object()) {
        out.push_back({file, index, "", "not-object"});
        return std::nullopt;
    }
    const std::size_t before = out.size();
    ResponseAction a;

    auto action = string_field(rec, field::action, true, file, index, out);
    auto trigger = string_field(rec, field::trigger_condition, true, file, index, out);

    const bool has_singular = rec.contains(std::string(field::work_requirement));
    const bool has_plural = rec.contains(std::string(field::work_requirements));
    std::optional<std::string> work;
    if (has_singular && has_plural) {
        out.push_back({file, index, std::string(field::work_requirement), "conflicting-spelling"});
    } else {
        a.plural_work_field = has_plural;
        work = string_field(rec, has_plural ? field::work_requirements : field::work_requirement, true, file, index, out);
    }

    auto ab = string_field(rec, field::responsible_ab, false, file, index, out);
    auto cd = string_field(rec, field::responsible_cd, false, file, index, out);
    auto limit = string_field(rec, field::time_limit, true, file, index, out);
    auto term = string_field(rec, field::termination_condition, false, file, index, out);

    if (out.size() != before) return std::nullopt;

    a.action = *action;
    a.trigger_condition_raw = *trigger;
    auto parsed = cond::parse_condition(*trigger);
    a.trigger_condition = std::move(parsed.expr);
    a.trigger_degraded = parsed.degraded;
    a.work_requirement = *work;
    a.responsible_ab = *ab;
    a.responsible_cd = *cd;
    a.time_limit = *limit;
    a.termination_condition = *term;
    return a;
}

void KnowledgeBase::add(DiseaseKB disease) {
    auto key = text::canonical(disease.disease);
    if (key.empty()) throw std::invalid_argument("disease name is empty");
    if (disease.actions.empty()) throw std::invalid_argument("disease has no actions: " + disease.disease);
    if (by_key_.contains(key)) throw std::invalid_argument("duplicate disease: " + disease.disease);
    by_key_.emplace(std::move(key), std::move(disease));
}

const DiseaseKB* KnowledgeBase::find(std::string_view disease) const {
    auto it = by_key_.find(text::canonical(disease));
    return it == by_key_.end() ? nullptr : &it->second;
}

KnowledgeBaseError::KnowledgeBaseError(std::vector<MalformedRecord> violations)
    : std::runtime_error([&] {
          std::string msg = "knowledge base has " + std::to_string(violations.size()) + " invalid entries";
          if (!violations.empty()) msg += "; first: " + violations.front().describe();
          return msg;
      }()),
      violations_(std::move(violations)) {}

KnowledgeBaseScan scan_knowledge_base(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw std::runtime_error("knowledge base directory not found: " + dir.string());

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());

    KnowledgeBaseScan scan;
    if (files.empty()) scan.warnings.push_back("no *.json files in " + dir.string());

    for (const auto& path : files) {
        const std::string file = path.filename().string();
        Json doc;
        try {
            std::ifstream in(path);
            doc = Json::parse(in);
        } catch (const Json::parse_error&) {
            scan.violations.push_back({file, std::nullopt, "", "invalid-json"});
            continue;
        }

        DiseaseKB disease;
        disease.source = file;
        const Json* records = nullptr;
        if (doc.is_array()) {
            disease.disease = path.stem().string();
            records = &doc;
        } else if (doc.is_object() && doc.contains("actions") && doc["actions"].is_array()) {
            if (!doc.contains("disease") || !doc["disease"].is_string() || text::trim(doc["disease"].get<std::string>()).empty()) {
                scan.violations.push_back({file, std::nullopt, "disease", "missing"});
                continue;
            }
            disease.disease = text::trim(doc["disease"].get<std::string>());
            records = &doc["actions"];
        } else {
            scan.violations.push_back({file, std::nullopt, "", "not-array"});
            continue;
        }

        if (records->empty()) {
            scan.violations.push_back({file, std::nullopt, "", "no-actions"});
            continue;
        }
        for (std::size_t i = 0; i < records->size(); ++i) {
            auto rec = parse_response_action((*records)[i], file, i, scan.violations);
            if (!rec) continue;
            if (rec->trigger_degraded) {
                scan.warnings.push_back(file + "[" + std::to_string(i) + "]: trigger condition \"" +
                                        rec->trigger_condition_raw + "\" kept as a single condition point");
            }
            disease.actions.push_back(std::move(*rec));
        }
        if (disease.actions.empty()) continue;
        if (scan.kb.find(disease.disease) != nullptr) {
            scan.violations.push_back({file, std::nullopt, "disease", "duplicate-disease"});
            continue;
        }
        scan.kb.add(std::move(disease));
    }
    return scan;
}

KnowledgeBase load_knowledge_base(const fs::path& dir, LoadMode mode) {
    auto scan = scan_knowledge_base(dir);
    for (const auto& w : scan.warnings) spdlog::warn("knowledge base: {}", w);
    if (!scan.violations.empty()) {
        if (mode == LoadMode::Strict) throw KnowledgeBaseError(std::move(scan.violations));
        for (const auto& v : scan.violations) spdlog::warn("knowledge base: skipped {}", v.describe());
    }
    return std::move(scan.kb);
}

void write_knowledge_base(const KnowledgeBase& kb, const fs::path& dir) {
    fs::create_directories(dir);
    for (const auto& [key, disease] : kb.entries()) {
        Json arr = Json::array();
        for (const auto& a : disease.actions) arr.push_back(to_json(a));
        std::ofstream out(dir / (disease.disease + ".json"));
        out << arr.dump(2) << '\n';
        if (!out) throw std::runtime_error("failed to write knowledge base file for " + disease.disease);
    }
}

std::vector<std::string> list_diseases(const KnowledgeBase& kb) {
    std::vector<std::string> names;
    for (const auto& [key, disease] : kb.entries()) names.push_back(disease.disease);
    std::stable_sort(names.begin(), names.end());
    return names;
}

const std::vector<ResponseAction>& retrieve_candidate_plans(const KnowledgeBase& kb, std::string_view disease) {
    const DiseaseKB* d = kb.find(disease);
    if (d == nullptr) throw UnknownDisease(std::string(disease));
    return d->actions;
}

std::vector<std::string> extract_condition_points(std::span<const ResponseAction> actions) {
    std::vector<cond::CondExpr> exprs;
    exprs.reserve(actions.size());
    for (const auto& a : actions) exprs.push_back(a.trigger_condition);
    return cond::collect_atoms(exprs);
}

const std::string& select_responsible_party(const ResponseAction& action, RiskLevel level) {
    return (level == RiskLevel::A || level == RiskLevel::B) ? action.responsible_ab : action.responsible_cd;
}

}  // namespace epiplan::kb
