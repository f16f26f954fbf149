#include "epiplan/flowgraph/executor.hpp"

#include "epiplan/modelclient/text_lists.hpp"

namespace epiplan::flow {

namespace {

const Json& slot(const SlotValues& slots, const std::string& name, const NodeSpec& node) {
    auto it = slots.find(name);
    if (it == slots.end()) throw SlotTypeMismatch("node " + node.id + ": slot \"" + name + "\" is unbound");
    return it->second;
}

Json run_model(const NodeSpec& node, const SlotValues& slots, const Registry& registry) {
    model::Bindings bindings;
    for (const auto& [name, value] : slots) bindings[name] = model::render_slot(value);

    model::Decoding decoding;
    decoding.temperature = node.params.value("temperature", 0.0);
    decoding.max_tokens = node.params.value("max_tokens", 2048);

    model::ModelRequest request;
    if (node.params.contains("template")) {
        auto id = model::template_from_string(node.params["template"].get<std::string>());
        if (!id) throw UnknownRegistryName("prompt template", node.params["template"].get<std::string>());
        request = model::make_request(*id, std::move(bindings), decoding);
    } else {
        auto tmpl = model::PromptTemplate::make(node.id, node.params.at("prompt").get<std::string>());
        request = model::make_request(tmpl, std::move(bindings), decoding);
    }
    auto response = model::complete(*registry.backend, request);

    if (auto it = node.params.find("parser"); it != node.params.end()) {
        auto name = it->get<std::string>();
        auto p = registry.parsers.find(name);
        if (p == registry.parsers.end()) throw UnknownRegistryName("parser", name);
        return p->second(response.text);
    }
    return Json(response.text);
}

Json run_rag(const NodeSpec& node, const SlotValues& slots, const Registry& registry) {
    const Json& key = slot(slots, node.params.at("key_slot").get<std::string>(), node);
    if (!key.is_string()) throw SlotTypeMismatch("node " + node.id + ": retrieval key must be a string");
    Json out = Json::array();
    for (const auto& a : kb::retrieve_candidate_plans(*registry.kb, key.get<std::string>())) out.push_back(kb::to_json(a));
    return out;
}

Json run_function(const NodeSpec& node, const SlotValues& slots, const Registry& registry) {
    auto name = node.params.at("function").get<std::string>();
    auto it = registry.functions.find(name);
    if (it == registry.functions.end()) throw UnknownRegistryName("function", name);
    return it->second(slots);
}

Json run_branch(const NodeSpec& node, const SlotValues& slots, const Registry& registry) {
    auto name = node.params.at("predicate").get<std::string>();
    auto it = registry.predicates.find(name);
    if (it == registry.predicates.end()) throw UnknownRegistryName("predicate", name);
    auto label = it->second(slots);
    if (!node.params.at("outcomes").contains(label))
        throw std::runtime_error("node " + node.id + ": predicate returned unknown outcome \"" + label + "\"");
    return Json(label);
}

Json run_for_loop(const NodeSpec& node, const SlotValues& slots, const Registry& registry, const Budget& budget) {
    const auto collection_slot = node.params.at("collection_slot").get<std::string>();
    const Json& collection = slot(slots, collection_slot, node);
    if (!collection.is_array())
        throw SlotTypeMismatch("node " + node.id + ": loop collection \"" + collection_slot + "\" is not an array");

    const FlowGraph body = graph_from_json(node.params.at("body"));
    Budget inner = budget;
    inner.max_parallel = 1;

    Json out = Json::array();
    for (std::size_t i = 0; i < collection.size(); ++i) {
        SlotValues inputs;
        for (const auto& name : body.entry_inputs)
            if (name != "item") inputs[name] = slot(slots, name, node);
        inputs["item"] = collection[i];
        auto result = execute(body, inputs, registry, inner);
        if (!result.ok()) {
            const auto& f = result.failures.front();
            throw std::runtime_error("node " + node.id + ": iteration " + std::to_string(i) + " failed at " + f.node +
                                     ": " + f.cause);
        }
        auto r = result.outputs.find("result");
        out.push_back(r == result.outputs.end() ? Json(nullptr) : r->second);
    }
    return out;
}

}  // namespace

Json run_node(const NodeSpec& node, const SlotValues& slots, const Registry& registry, const Budget& budget) {
    switch (node.kind) {
        case NodeKind::Model: return run_model(node, slots, registry);
        case NodeKind::Rag: return run_rag(node, slots, registry);
        case NodeKind::Code:
        case NodeKind::WebSearch: return run_function(node, slots, registry);
        case NodeKind::Branch: return run_branch(node, slots, registry);
        case NodeKind::ForLoop: return run_for_loop(node, slots, registry, budget);
    }
    throw std::logic_error("unhandled node kind");
}

}  // namespace epiplan::flow
