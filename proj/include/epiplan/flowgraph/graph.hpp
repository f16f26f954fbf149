#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "epiplan/common/json.hpp"

namespace epiplan::flow {

enum class NodeKind { Model, Rag, Code, WebSearch, Branch, ForLoop };

std::string_view to_string(NodeKind kind);
std::optional<NodeKind> node_kind_from_string(std::string_view s);

// Kind-specific params:
//   Model      template | prompt, [parser], [temperature], [max_tokens]
//   Rag        key_slot
//   Code       function
//   WebSearch  function
//   Branch     predicate, outcomes {label: [successor ids]}
//   ForLoop    collection_slot, body (graph JSON; entry "item", output "result")
struct NodeSpec {
    std::string id;
    NodeKind kind = NodeKind::Code;
    Json params = Json::object();
};

// `from` names a node, or an entry input when written "$name". An empty
// slot orders the two nodes without passing a value.
struct Edge {
    std::string from;
    std::string to;
    std::string slot;
};

inline bool is_entry_ref(std::string_view from) { return !from.empty() && from.front() == '$'; }

struct FlowGraph {
    std::vector<std::string> entry_inputs;
    std::vector<NodeSpec> nodes;
    std::vector<Edge> edges;
    std::map<std::string, std::string> outputs;  // output name -> node id

    const NodeSpec* find(std::string_view id) const;
};

Json to_json(const FlowGraph& g);

// Structural JSON errors (wrong types, unknown kind) throw std::invalid_argument;
// semantic problems are left to validate_graph.
FlowGraph graph_from_json(const Json& j);

// Successor ids named by a Branch node's outcomes, with their labels.
std::vector<std::pair<std::string, std::string>> branch_successors(const NodeSpec& node);

}  // namespace epiplan::flow
