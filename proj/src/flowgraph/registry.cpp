#include "epiplan/flowgraph/registry.hpp"

namespace epiplan::flow {

namespace {

template <typename Map>
void require(const Map& m, const NodeSpec& n, const char* key, const char* kind, ValidationReport& out) {
    auto it = n.params.find(key);
    if (it == n.params.end() || !it->is_string()) return;  // validate_graph reports these
    if (!m.contains(it->template get<std::string>()))
        out.push_back({"unknown-registry-name", n.id, std::string(kind) + ":" + it->template get<std::string>()});
}

}  // namespace

ValidationReport check_registry(const FlowGraph& graph, const Registry& registry) {
    ValidationReport out;
    for (const auto& n : graph.nodes) {
        switch (n.kind) {
            case NodeKind::Model:
                if (registry.backend == nullptr) out.push_back({"unknown-registry-name", n.id, "backend:model"});
                require(registry.parsers, n, "parser", "parser", out);
                break;
            case NodeKind::Rag:
                if (registry.kb == nullptr) out.push_back({"unknown-registry-name", n.id, "knowledge base:kb"});
                break;
            case NodeKind::Code:
            case NodeKind::WebSearch: require(registry.functions, n, "function", "function", out); break;
            case NodeKind::Branch: require(registry.predicates, n, "predicate", "predicate", out); break;
            case NodeKind::ForLoop: {
                auto it = n.params.find("body");
                if (it == n.params.end() || !it->is_object()) break;
                try {
                    for (auto v : check_registry(graph_from_json(*it), registry)) {
                        v.subject = n.id + "/" + v.subject;
                        out.push_back(std::move(v));
                    }
                } catch (const std::invalid_argument&) {
                    // malformed bodies are validate_graph's to report
                }
                break;
            }
        }
    }
    return out;
}

}  // namespace epiplan::flow
