#include "epiplan/flowgraph/graph.hpp"

#include <stdexcept>

namespace epiplan::flow {

namespace {
constexpr std::pair<NodeKind, std::string_view> kKinds[] = {
    {NodeKind::Model, "Model"},         {NodeKind::Rag, "Rag"},       {NodeKind::Code, "Code"},
    {NodeKind::WebSearch, "WebSearch"}, {NodeKind::Branch, "Branch"}, {NodeKind::ForLoop, "ForLoop"},
};
}  // namespace

std::string_view to_string(NodeKind kind) {
    for (const auto& [k, name] : kKinds)
        if (k == kind) return name;
    return "";
}

std::optional<NodeKind> node_kind_from_string(std::string_view s) {
    for (const auto& [k, name] : kKinds)
        if (name == s) return k;
    return std::nullopt;
}

const NodeSpec* FlowGraph::find(std::string_view id) const {
    for (const auto& n : nodes)
        if (n.id == id) return &n;
    return nullptr;
}

Json to_json(const FlowGraph& g) {
    Json j;
    j["inputs"] = g.entry_inputs;
    j["nodes"] = Json::array();
    for (const auto& n : g.nodes) j["nodes"].push_back(Json{{"id", n.id}, {"kind", to_string(n.kind)}, {"params", n.params}});
    j["edges"] = Json::array();
    for (const auto& e : g.edges) {
        Json edge{{"from", e.from}, {"to", e.to}};
        if (!e.slot.empty()) edge["slot"] = e.slot;
        j["edges"].push_back(std::move(edge));
    }
    j["outputs"] = Json::object();
    for (const auto& [name, node] : g.outputs) j["outputs"][name] = node;
    return j;
}

FlowGraph graph_from_json(const Json& j) {
    if (!j.is_object()) throw std::invalid_argument("graph must be a JSON object");
    FlowGraph g;
    try {
        if (j.contains("inputs")) g.entry_inputs = j.at("inputs").get<std::vector<std::string>>();
        for (const auto& n : j.at("nodes")) {
            NodeSpec spec;
            spec.id = n.at("id").get<std::string>();
            auto kind_name = n.at("kind").get<std::string>();
            auto kind = node_kind_from_string(kind_name);
            if (!kind) throw std::invalid_argument("node " + spec.id + ": unknown kind " + kind_name);
            spec.kind = *kind;
            if (n.contains("params")) spec.params = n.at("params");
            if (!spec.params.is_object()) throw std::invalid_argument("node " + spec.id + ": params must be an object");
            g.nodes.push_back(std::move(spec));
        }
        if (j.contains("edges")) {
            for (const auto& e : j.at("edges"))
                g.edges.push_back({e.at("from").get<std::string>(), e.at("to").get<std::string>(), e.value("slot", "")});
        }
        if (j.contains("outputs")) {
            for (const auto& [name, node] : j.at("outputs").items()) g.outputs[name] = node.get<std::string>();
        }
    } catch (const Json::exception& e) {
        throw std::invalid_argument(std::string("malformed graph JSON: ") + e.what());
    }
    return g;
}

std::vector<std::pair<std::string, std::string>> branch_successors(const NodeSpec& node) {
    std::vector<std::pair<std::string, std::string>> out;
    if (node.kind != NodeKind::Branch) return out;
    auto it = node.params.find("outcomes");
    if (it == node.params.end() || !it->is_object()) return out;
    for (const auto& [label, ids] : it->items()) {
        if (!ids.is_array()) continue;
        for (const auto& id : ids)
            if (id.is_string()) out.emplace_back(label, id.get<std::string>());
    }
    return out;
}

}  // namespace epiplan::flow
