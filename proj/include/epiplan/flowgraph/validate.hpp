#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "epiplan/common/json.hpp"
#include "epiplan/flowgraph/graph.hpp"

namespace epiplan::flow {

// Rules: duplicate-node, dangling-edge, dangling-output, cycle, missing-param,
// unknown-template, missing-binding, unknown-slot, duplicate-slot,
// branch-empty-outcome, branch-overlap, branch-unknown-successor, invalid-body.
struct Violation {
    std::string rule;
    std::string subject;
    std::string detail;

    bool operator==(const Violation&) const = default;
};

using ValidationReport = std::vector<Violation>;

Json to_json(const Violation& v);
Json to_json(const ValidationReport& report);

ValidationReport validate_graph(const FlowGraph& graph);

class InvalidGraph : public std::invalid_argument {
public:
    explicit InvalidGraph(ValidationReport report);
    const ValidationReport& report() const { return report_; }

private:
    ValidationReport report_;
};

// Slots bound on `node_id` by incoming edges, in edge order.
std::vector<std::string> bound_slots(const FlowGraph& graph, const std::string& node_id);

// Node ids in an order where every dependency (data, ordering or branch
// control edge) precedes its dependents. Assumes the graph is acyclic.
std::vector<std::string> topological_order(const FlowGraph& graph);

}  // namespace epiplan::flow
