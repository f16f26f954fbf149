#include "epiplan/evalharness/summary.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace epiplan::eval {

namespace {

Json to_json(const MeanSd& m) {
    Json j;
    j["n"] = m.n;
    j["mean"] = m.mean;
    j["sd"] = m.sd;
    if (m.n == 1) j["single"] = true;
    return j;
}

Json to_json(const RoundResult& r) {
    Json j;
    j["tasks"] = r.tasks;
    j["completeness"] = r.score.completeness;
    j["hits"] = r.score.hits;
    j["misses"] = r.score.misses;
    j["extras"] = r.score.extras;
    j["time_ms"] = r.time_ms;
    return j;
}

GroupStats group_stats(std::string name, const std::vector<const ScenarioRow*>& rows) {
    GroupStats g;
    g.group = std::move(name);
    std::vector<double> r1, r2, t1, t2;
    for (const auto* row : rows) {
        if (row->failed) {
            ++g.failed;
            continue;
        }
        r1.push_back(row->r1.score.completeness);
        r2.push_back(row->r2.score.completeness);
        t1.push_back(row->r1.time_ms);
        t2.push_back(row->r2.time_ms);
    }
    g.r1 = mean_sd(r1);
    g.r2 = mean_sd(r2);
    g.r1_time_ms = mean_sd(t1);
    g.r2_time_ms = mean_sd(t2);
    return g;
}

std::vector<GroupStats> grouped(const std::vector<ScenarioRow>& rows, std::function<std::string(const ScenarioRow&)> key) {
    std::map<std::string, std::vector<const ScenarioRow*>> groups;
    for (const auto& r : rows) groups[key(r)].push_back(&r);
    std::vector<GroupStats> out;
    for (const auto& [name, members] : groups) out.push_back(group_stats(name, members));
    return out;
}

std::string csv(const std::vector<GroupStats>& groups) {
    std::ostringstream os;
    os << "group,n,failed,r1_mean,r1_sd,r2_mean,r2_sd,r1_time_ms_mean,r2_time_ms_mean\n";
    os.setf(std::ios::fixed);
    os.precision(4);
    for (const auto& g : groups) {
        std::string name = g.group;
        if (name.find_first_of(",\"") != std::string::npos) {
            std::string quoted = "\"";
            for (char c : name) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
            name = quoted + "\"";
        }
        os << name << ',' << g.r1.n << ',' << g.failed << ',' << g.r1.mean << ',' << g.r1.sd << ',' << g.r2.mean << ','
           << g.r2.sd << ',' << g.r1_time_ms.mean << ',' << g.r2_time_ms.mean << '\n';
    }
    return os.str();
}

}  // namespace

Json to_json(const ScenarioRow& row) {
    Json j;
    j["scenario"] = row.scenario_id;
    j["disease"] = row.disease;
    j["disease_type"] = row.disease_type;
    j["status"] = row.failed ? "Failed" : "Scored";
    if (row.failed) {
        j["error"] = row.error;
    } else {
        j["r1"] = to_json(row.r1);
        j["r2"] = to_json(row.r2);
    }
    return j;
}

Json to_json(const GroupStats& g) {
    Json j;
    j["group"] = g.group;
    j["failed"] = g.failed;
    j["r1_completeness"] = to_json(g.r1);
    j["r2_completeness"] = to_json(g.r2);
    j["r1_time_ms"] = to_json(g.r1_time_ms);
    j["r2_time_ms"] = to_json(g.r2_time_ms);
    return j;
}

BenchmarkSummary summarize_runs(std::vector<ScenarioRow> rows) {
    if (rows.empty()) throw std::invalid_argument("no benchmark rows to summarize");
    std::stable_sort(rows.begin(), rows.end(),
                     [](const ScenarioRow& a, const ScenarioRow& b) { return a.scenario_id < b.scenario_id; });
    BenchmarkSummary s;
    s.rows = std::move(rows);
    std::vector<const ScenarioRow*> all;
    for (const auto& r : s.rows) all.push_back(&r);
    s.overall = group_stats("overall", all);
    s.by_disease = grouped(s.rows, [](const ScenarioRow& r) { return r.disease; });
    s.by_type = grouped(s.rows, [](const ScenarioRow& r) { return r.disease_type; });
    return s;
}

Json to_json(const BenchmarkSummary& s) {
    Json j;
    j["rows"] = Json::array();
    for (const auto& r : s.rows) j["rows"].push_back(to_json(r));
    j["overall"] = to_json(s.overall);
    j["by_disease"] = Json::array();
    for (const auto& g : s.by_disease) j["by_disease"].push_back(to_json(g));
    j["by_type"] = Json::array();
    for (const auto& g : s.by_type) j["by_type"].push_back(to_json(g));
    return j;
}

std::string disease_table_csv(const BenchmarkSummary& s) { return csv(s.by_disease); }
std::string type_table_csv(const BenchmarkSummary& s) { return csv(s.by_type); }

}  // namespace epiplan::eval
