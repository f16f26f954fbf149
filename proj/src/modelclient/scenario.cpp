#include "epiplan/modelclient/scenario.hpp"

#include <algorithm>
#include <fstream>

#include "epiplan/common/text.hpp"

namespace epiplan::model {

namespace {

std::string str_or(const Json& j, const char* key, std::string fallback = {}) {
    auto it = j.find(key);
    return it != j.end() && it->is_string() ? it->get<std::string>() : fallback;
}

std::vector<std::string> strings_or_empty(const Json& j, const char* key) {
    auto it = j.find(key);
    return it != j.end() ? it->get<std::vector<std::string>>() : std::vector<std::string>{};
}

}  // namespace

FeedbackRoundSpec feedback_round_from_json(const Json& r) {
    FeedbackRoundSpec round;
    round.default_status = str_or(r, "default_status", "Completed");
    round.new_facts = strings_or_empty(r, "new_facts");
    if (auto items = r.find("items"); items != r.end()) {
        for (const auto& i : *items) {
            FeedbackItemSpec item;
            if (i.contains("index")) item.index = i.at("index").get<std::size_t>();
            item.action = str_or(i, "action");
            item.status = str_or(i, "status", round.default_status);
            item.note = str_or(i, "note");
            if (!item.index && item.action.empty()) throw std::invalid_argument("feedback item needs index or action");
            round.items.push_back(std::move(item));
        }
    }
    return round;
}

Scenario scenario_from_json(const Json& j) {
    Scenario s;
    s.id = j.at("id").get<std::string>();
    s.disease = j.at("disease").get<std::string>();
    s.disease_type = str_or(j, "disease_type");
    auto level = kb::parse_risk_level(str_or(j, "risk_level", "A"));
    if (!level) throw std::invalid_argument("scenario " + s.id + ": invalid risk_level");
    s.risk_level = *level;
    s.report = j.at("report").get<std::string>();
    s.basic_case_info = str_or(j, "basic_case_info");
    s.risk_case_info = str_or(j, "risk_case_info");
    s.facts = strings_or_empty(j, "facts");
    s.negations = strings_or_empty(j, "negations");
    if (auto it = j.find("feedback_rounds"); it != j.end()) {
        try {
            for (const auto& r : *it) s.feedback_rounds.push_back(feedback_round_from_json(r));
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("scenario " + s.id + ": " + e.what());
        }
    }
    if (auto it = j.find("checklist"); it != j.end()) {
        s.checklist.required_actions = strings_or_empty(*it, "required_actions");
        if (auto syn = it->find("synonyms"); syn != it->end()) {
            for (const auto& [k, v] : syn->items())
                s.checklist.synonyms[text::canonical(k)] = v.get<std::vector<std::string>>();
        }
    }
    return s;
}

Json to_json(const Scenario& s) {
    Json j;
    j["id"] = s.id;
    j["disease"] = s.disease;
    j["disease_type"] = s.disease_type;
    j["risk_level"] = kb::to_string(s.risk_level);
    j["report"] = s.report;
    j["basic_case_info"] = s.basic_case_info;
    j["risk_case_info"] = s.risk_case_info;
    j["facts"] = s.facts;
    j["negations"] = s.negations;
    j["feedback_rounds"] = Json::array();
    for (const auto& r : s.feedback_rounds) {
        Json round;
        round["default_status"] = r.default_status;
        round["items"] = Json::array();
        for (const auto& i : r.items) {
            Json item;
            if (i.index) item["index"] = *i.index;
            if (!i.action.empty()) item["action"] = i.action;
            item["status"] = i.status;
            if (!i.note.empty()) item["note"] = i.note;
            round["items"].push_back(std::move(item));
        }
        round["new_facts"] = r.new_facts;
        j["feedback_rounds"].push_back(std::move(round));
    }
    j["checklist"]["required_actions"] = s.checklist.required_actions;
    j["checklist"]["synonyms"] = Json::object();
    for (const auto& [k, v] : s.checklist.synonyms) j["checklist"]["synonyms"][k] = v;
    return j;
}

Scenario load_scenario(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open scenario " + file.string());
    try {
        return scenario_from_json(Json::parse(in));
    } catch (const std::exception& e) {
        throw std::runtime_error("invalid scenario " + file.string() + ": " + e.what());
    }
}

std::vector<Scenario> load_scenarios(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw std::runtime_error("scenario directory not found: " + dir.string());
    std::vector<Scenario> out;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") out.push_back(load_scenario(entry.path()));
    }
    std::sort(out.begin(), out.end(), [](const Scenario& a, const Scenario& b) { return a.id < b.id; });
    return out;
}

const Scenario* find_scenario_for_report(const std::vector<Scenario>& scenarios, std::string_view report) {
    const auto haystack = text::canonical(report);
    const Scenario* best = nullptr;
    std::size_t best_len = 0;
    for (const auto& s : scenarios) {
        auto needle = text::canonical(s.report);
        if (needle.empty() || needle.size() <= best_len) continue;
        if (haystack.find(needle) != std::string::npos) {
            best = &s;
            best_len = needle.size();
        }
    }
    return best;
}

std::vector<std::string> field_findings(std::string_view report) {
    std::vector<std::string> out;
    bool in_section = false;
    for (const auto& raw : text::split_lines(report)) {
        auto line = text::trim(raw);
        if (line == kFieldFindingsHeader) {
            in_section = true;
            continue;
        }
        if (!in_section) continue;
        if (line.rfind("- ", 0) == 0) {
            out.push_back(text::trim(line.substr(2)));
        } else if (!line.empty()) {
            in_section = false;
        }
    }
    return out;
}

std::string with_field_findings(const std::string& report, const std::vector<std::string>& findings) {
    if (findings.empty()) return report;
    std::string out = report;
    out += "\n\n";
    out += kFieldFindingsHeader;
    for (const auto& f : findings) out += "\n- " + f;
    return out;
}

}  // namespace epiplan::model
