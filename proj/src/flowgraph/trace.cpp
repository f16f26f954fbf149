#include "epiplan/flowgraph/executor.hpp"

namespace epiplan::flow {

const TraceRecord* ExecutionTrace::find(std::string_view node) const {
    for (const auto& r : records)
        if (r.node == node) return &r;
    return nullptr;
}

Json to_json(const TraceRecord& r, bool with_timing) {
    Json j;
    j["node"] = r.node;
    j["kind"] = to_string(r.kind);
    j["status"] = to_string(r.status);
    j["attempts"] = r.attempts;
    if (with_timing) {
        j["start_ms"] = r.start_ms ? Json(*r.start_ms) : Json(nullptr);
        j["end_ms"] = r.end_ms ? Json(*r.end_ms) : Json(nullptr);
    }
    j["inputs"] = r.inputs;
    j["output"] = r.output;
    if (!r.error.empty()) j["error"] = r.error;
    return j;
}

Json ExecutionTrace::to_json(bool with_timing) const {
    Json arr = Json::array();
    for (const auto& r : records) arr.push_back(flow::to_json(r, with_timing));
    return arr;
}

std::string ExecutionTrace::to_jsonl(bool with_timing) const {
    std::string out;
    for (const auto& r : records) {
        out += flow::to_json(r, with_timing).dump();
        out.push_back('\n');
    }
    return out;
}

}  // namespace epiplan::flow
