#pragma once

#include <chrono>
#include <exception>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "epiplan/common/errors.hpp"
#include "epiplan/common/json.hpp"
#include "epiplan/flowgraph/graph.hpp"
#include "epiplan/flowgraph/registry.hpp"

namespace epiplan::flow {

struct Budget {
    std::size_t max_parallel = 4;
    std::chrono::milliseconds per_node_timeout{60'000};
    int max_retries = 2;
};

enum class NodeStatus { Succeeded, Failed, Skipped };
std::string_view to_string(NodeStatus s);

struct TraceRecord {
    std::string node;
    NodeKind kind = NodeKind::Code;
    NodeStatus status = NodeStatus::Skipped;
    int attempts = 0;
    std::optional<double> start_ms;  // relative to the start of execute()
    std::optional<double> end_ms;
    Json inputs = Json::object();
    Json output;                     // null unless Succeeded
    std::string error;               // failure cause, or why the node was skipped
};

struct ExecutionTrace {
    std::vector<TraceRecord> records;  // graph declaration order

    const TraceRecord* find(std::string_view node) const;
    Json to_json(bool with_timing = true) const;
    // One JSON object per line.
    std::string to_jsonl(bool with_timing = true) const;
};

Json to_json(const TraceRecord& r, bool with_timing = true);

struct NodeFailureInfo {
    std::string node;
    std::string cause;
    int attempts = 0;
    bool retryable = false;  // true when the retry budget ran out
    std::exception_ptr error;  // the last attempt's exception
};

struct ExecutionResult {
    std::map<std::string, Json> outputs;  // only outputs whose node succeeded
    ExecutionTrace trace;
    std::vector<NodeFailureInfo> failures;

    bool ok() const { return failures.empty(); }
};

class Timeout : public RetryableError {
public:
    using RetryableError::RetryableError;
};

class SlotTypeMismatch : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NodeFailure : public std::runtime_error {
public:
    explicit NodeFailure(NodeFailureInfo info)
        : std::runtime_error("node " + info.node + " failed after " + std::to_string(info.attempts) +
                             " attempt(s): " + info.cause),
          info_(std::move(info)) {}
    const NodeFailureInfo& info() const { return info_; }

private:
    NodeFailureInfo info_;
};

// Runs one node body once, with no retries.
Json run_node(const NodeSpec& node, const SlotValues& slots, const Registry& registry, const Budget& budget);

// Throws InvalidGraph, UnknownRegistryName, or std::invalid_argument for
// missing/unknown entry inputs before anything runs. Node failures are
// reported in the result, never thrown.
ExecutionResult execute(const FlowGraph& graph, const SlotValues& inputs, const Registry& registry,
                        const Budget& budget = {});

}  // namespace epiplan::flow
