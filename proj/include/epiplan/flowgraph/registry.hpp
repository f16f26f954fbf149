#pragma once

#include <functional>
#include <map>
#include <stdexcept>
#include <string>

#include "epiplan/common/json.hpp"
#include "epiplan/flowgraph/graph.hpp"
#include "epiplan/flowgraph/validate.hpp"
#include "epiplan/knowledge/knowledge_base.hpp"
#include "epiplan/modelclient/backend.hpp"

namespace epiplan::flow {

using SlotValues = std::map<std::string, Json>;
using NodeFunction = std::function<Json(const SlotValues&)>;
using Predicate = std::function<std::string(const SlotValues&)>;
using OutputParser = std::function<Json(const std::string&)>;

// What nodes may refer to by name. Everything here must be safe to call
// concurrently; the executor never serialises calls.
struct Registry {
    std::map<std::string, NodeFunction> functions;   // Code and WebSearch
    std::map<std::string, Predicate> predicates;     // Branch
    std::map<std::string, OutputParser> parsers;     // Model output post-processing
    model::ModelBackend* backend = nullptr;          // required by Model nodes
    const kb::KnowledgeBase* kb = nullptr;           // required by Rag nodes
};

class UnknownRegistryName : public std::invalid_argument {
public:
    UnknownRegistryName(std::string kind, std::string name)
        : std::invalid_argument("no " + kind + " registered as \"" + name + "\""), kind_(std::move(kind)), name_(std::move(name)) {}
    const std::string& kind() const { return kind_; }
    const std::string& name() const { return name_; }

private:
    std::string kind_;
    std::string name_;
};

// Names referenced by the graph (ForLoop bodies included) that the registry
// lacks, as rule "unknown-registry-name" with subject = node id and
// detail = "<kind>:<name>".
ValidationReport check_registry(const FlowGraph& graph, const Registry& registry);

}  // namespace epiplan::flow
