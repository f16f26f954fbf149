#include "epiplan/flowgraph/validate.hpp"

#include <deque>
#include <map>
#include <set>

#include "epiplan/modelclient/prompts.hpp"

namespace epiplan::flow {

Json to_json(const Violation& v) {
    Json j{{"rule", v.rule}, {"subject", v.subject}};
    if (!v.detail.empty()) j["detail"] = v.detail;
    return j;
}

Json to_json(const ValidationReport& report) {
    Json arr = Json::array();
    for (const auto& v : report) arr.push_back(to_json(v));
    return arr;
}

InvalidGraph::InvalidGraph(ValidationReport report)
    : std::invalid_argument([&] {
          std::string msg = "invalid workflow graph";
          for (const auto& v : report) {
              msg += "; " + v.rule + " (" + v.subject + (v.detail.empty() ? "" : ": " + v.detail) + ")";
          }
          return msg;
      }()),
      report_(std::move(report)) {}

std::vector<std::string> bound_slots(const FlowGraph& graph, const std::string& node_id) {
    std::vector<std::string> out;
    for (const auto& e : graph.edges)
        if (e.to == node_id && !e.slot.empty()) out.push_back(e.slot);
    return out;
}

namespace {

// Dependency lists (both directions) over existing nodes only.
struct Adjacency {
    std::map<std::string, std::set<std::string>> preds;
    std::map<std::string, std::set<std::string>> succs;
};

Adjacency adjacency(const FlowGraph& g) {
    Adjacency a;
    std::set<std::string> ids;
    for (const auto& n : g.nodes) {
        ids.insert(n.id);
        a.preds[n.id];
        a.succs[n.id];
    }
    auto link = [&](const std::string& from, const std::string& to) {
        if (!ids.contains(from) || !ids.contains(to)) return;
        a.preds[to].insert(from);
        a.succs[from].insert(to);
    };
    for (const auto& e : g.edges)
        if (!is_entry_ref(e.from)) link(e.from, e.to);
    for (const auto& n : g.nodes)
        for (const auto& [label, succ] : branch_successors(n)) link(n.id, succ);
    return a;
}

std::optional<std::string> string_param(const NodeSpec& n, const char* key) {
    auto it = n.params.find(key);
    if (it == n.params.end() || !it->is_string() || it->get<std::string>().empty()) return std::nullopt;
    return it->get<std::string>();
}

void check_model(const FlowGraph& g, const NodeSpec& n, ValidationReport& out) {
    std::set<std::string> placeholders;
    if (auto name = string_param(n, "template")) {
        auto id = model::template_from_string(*name);
        if (!id) {
            out.push_back({"unknown-template", n.id, *name});
            return;
        }
        placeholders = model::builtin_template(*id).placeholders;
    } else if (auto prompt = string_param(n, "prompt")) {
        placeholders = model::placeholders_in(*prompt);
    } else {
        out.push_back({"missing-param", n.id, "template"});
        return;
    }
    auto slots = bound_slots(g, n.id);
    std::set<std::string> slot_set(slots.begin(), slots.end());
    for (const auto& p : placeholders)
        if (!slot_set.contains(p)) out.push_back({"missing-binding", n.id, p});
    for (const auto& s : slot_set)
        if (!placeholders.contains(s)) out.push_back({"unknown-slot", n.id, s});
}

void require_bound(const FlowGraph& g, const NodeSpec& n, const char* key, ValidationReport& out) {
    auto slot = string_param(n, key);
    if (!slot) {
        out.push_back({"missing-param", n.id, key});
        return;
    }
    auto slots = bound_slots(g, n.id);
    if (std::find(slots.begin(), slots.end(), *slot) == slots.end()) out.push_back({"missing-binding", n.id, *slot});
}

void check_branch(const FlowGraph& g, const NodeSpec& n, ValidationReport& out) {
    if (!string_param(n, "predicate")) out.push_back({"missing-param", n.id, "predicate"});
    auto it = n.params.find("outcomes");
    if (it == n.params.end() || !it->is_object() || it->empty()) {
        out.push_back({"missing-param", n.id, "outcomes"});
        return;
    }
    std::map<std::string, std::string> owner;
    for (const auto& [label, ids] : it->items()) {
        if (!ids.is_array() || ids.empty()) {
            out.push_back({"branch-empty-outcome", n.id, label});
            continue;
        }
        for (const auto& idv : ids) {
            if (!idv.is_string()) {
                out.push_back({"branch-unknown-successor", n.id, idv.dump()});
                continue;
            }
            auto id = idv.get<std::string>();
            if (g.find(id) == nullptr) out.push_back({"branch-unknown-successor", n.id, id});
            auto [pos, inserted] = owner.emplace(id, label);
            if (!inserted && pos->second != label) out.push_back({"branch-overlap", n.id, id});
        }
    }
}

void check_for_loop(const FlowGraph& g, const NodeSpec& n, ValidationReport& out) {
    require_bound(g, n, "collection_slot", out);
    auto it = n.params.find("body");
    if (it == n.params.end() || !it->is_object()) {
        out.push_back({"missing-param", n.id, "body"});
        return;
    }
    FlowGraph body;
    try {
        body = graph_from_json(*it);
    } catch (const std::invalid_argument& e) {
        out.push_back({"invalid-body", n.id, e.what()});
        return;
    }
    for (const auto& v : validate_graph(body)) out.push_back({"invalid-body", n.id, v.rule + " " + v.subject});
    if (std::find(body.entry_inputs.begin(), body.entry_inputs.end(), "item") == body.entry_inputs.end())
        out.push_back({"invalid-body", n.id, "body has no \"item\" input"});
    if (!body.outputs.contains("result")) out.push_back({"invalid-body", n.id, "body has no \"result\" output"});
    auto slots = bound_slots(g, n.id);
    for (const auto& in : body.entry_inputs) {
        if (in != "item" && std::find(slots.begin(), slots.end(), in) == slots.end())
            out.push_back({"invalid-body", n.id, "body input \"" + in + "\" is not bound on the loop"});
    }
}

}  // namespace

ValidationReport validate_graph(const FlowGraph& g) {
    ValidationReport out;
    std::set<std::string> ids;
    for (const auto& n : g.nodes)
        if (!ids.insert(n.id).second) out.push_back({"duplicate-node", n.id, ""});
    std::set<std::string> entries(g.entry_inputs.begin(), g.entry_inputs.end());

    std::set<std::pair<std::string, std::string>> slot_seen;
    for (const auto& e : g.edges) {
        if (is_entry_ref(e.from)) {
            if (!entries.contains(e.from.substr(1))) out.push_back({"dangling-edge", e.from, "to " + e.to});
        } else if (!ids.contains(e.from)) {
            out.push_back({"dangling-edge", e.from, "to " + e.to});
        }
        if (!ids.contains(e.to)) out.push_back({"dangling-edge", e.to, "from " + e.from});
        if (!e.slot.empty() && !slot_seen.insert({e.to, e.slot}).second) out.push_back({"duplicate-slot", e.to, e.slot});
    }
    for (const auto& [name, node] : g.outputs)
        if (!ids.contains(node)) out.push_back({"dangling-output", node, name});

    for (const auto& n : g.nodes) {
        switch (n.kind) {
            case NodeKind::Model: check_model(g, n, out); break;
            case NodeKind::Rag: require_bound(g, n, "key_slot", out); break;
            case NodeKind::Code:
            case NodeKind::WebSearch:
                if (!string_param(n, "function")) out.push_back({"missing-param", n.id, "function"});
                break;
            case NodeKind::Branch: check_branch(g, n, out); break;
            case NodeKind::ForLoop: check_for_loop(g, n, out); break;
        }
    }

    // Kahn's algorithm; whatever cannot be ordered sits on or behind a cycle.
    auto adj = adjacency(g);
    std::map<std::string, std::size_t> indeg;
    std::deque<std::string> ready;
    for (const auto& [id, preds] : adj.preds) {
        indeg[id] = preds.size();
        if (preds.empty()) ready.push_back(id);
    }
    std::size_t ordered = 0;
    while (!ready.empty()) {
        auto id = ready.front();
        ready.pop_front();
        ++ordered;
        for (const auto& s : adj.succs[id])
            if (--indeg[s] == 0) ready.push_back(s);
    }
    if (ordered != adj.preds.size()) {
        std::set<std::string> rest;
        for (const auto& [id, d] : indeg)
            if (d > 0) rest.insert(id);
        // Peel off nodes that merely hang below a cycle.
        for (bool changed = true; changed;) {
            changed = false;
            for (auto it = rest.begin(); it != rest.end();) {
                bool feeds_rest = false;
                for (const auto& s : adj.succs[*it]) feeds_rest = feeds_rest || rest.contains(s);
                if (!feeds_rest) {
                    it = rest.erase(it);
                    changed = true;
                } else {
                    ++it;
                }
            }
        }
        out.push_back({"cycle", rest.empty() ? std::string() : *rest.begin(), ""});
    }
    return out;
}

std::vector<std::string> topological_order(const FlowGraph& g) {
    auto adj = adjacency(g);
    std::map<std::string, std::size_t> indeg;
    for (const auto& [id, preds] : adj.preds) indeg[id] = preds.size();
    std::vector<std::string> order;
    std::vector<bool> done(g.nodes.size(), false);
    // Repeatedly take the first node in declaration order that is ready,
    // so the order is stable for a given graph.
    while (order.size() < g.nodes.size()) {
        bool progressed = false;
        for (std::size_t i = 0; i < g.nodes.size(); ++i) {
            const auto& id = g.nodes[i].id;
            if (done[i] || indeg[id] != 0) continue;
            done[i] = true;
            order.push_back(id);
            for (const auto& s : adj.succs[id]) --indeg[s];
            progressed = true;
            break;
        }
        if (!progressed) break;
    }
    return order;
}

}  // namespace epiplan::flow
