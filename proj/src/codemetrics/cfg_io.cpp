#include "vcp/codemetrics/cfg_io.hpp"

namespace vcp::codemetrics {

ControlFlowGraph cfg_from_json(const Json& doc, const std::string& where) {
    if (!doc.is_object()) throw ValidationError(where + ": CFG document must be an object");
    reject_unknown_keys(doc, {"name", "nodes", "edges", "entry", "exit"}, where);
    ControlFlowGraph g;
    g.name = doc.contains("name") ? require_string(doc, "name", where) : where;
    g.entry = static_cast<int>(require_integer(doc, "entry", where));
    g.exit = static_cast<int>(require_integer(doc, "exit", where));

    const auto& nodes = require_field(doc, "nodes", where);
    if (!nodes.is_array()) throw ValidationError(where + ": field 'nodes' must be an array");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto at = where + ": nodes[" + std::to_string(i) + "]";
        CfgNode n;
        if (nodes[i].is_number_integer()) {
            n.id = nodes[i].get<int>();
        } else {
            n.id = static_cast<int>(require_integer(nodes[i], "id", at));
            if (nodes[i].contains("statements"))
                n.statements = nodes[i]["statements"].get<std::vector<std::string>>();
            if (nodes[i].contains("condition"))
                n.condition = require_string(nodes[i], "condition", at);
        }
        n.kind = n.id == g.entry  ? CfgNode::Kind::Entry
                 : n.id == g.exit ? CfgNode::Kind::Exit
                                  : CfgNode::Kind::Block;
        g.nodes.push_back(std::move(n));
    }

    const auto& edges = require_field(doc, "edges", where);
    if (!edges.is_array()) throw ValidationError(where + ": field 'edges' must be an array");
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const auto at = where + ": edges[" + std::to_string(i) + "]";
        CfgEdge e;
        e.from = static_cast<int>(require_integer(edges[i], "from", at));
        e.to = static_cast<int>(require_integer(edges[i], "to", at));
        const auto label = require_string(edges[i], "label", at);
        const auto parsed = edge_label_from_string(label);
        if (!parsed) throw ValidationError(at + ": unknown edge label '" + label + "'");
        e.label = *parsed;
        g.edges.push_back(e);
    }
    g.validate();
    return g;
}

Json cfg_to_json(const ControlFlowGraph& cfg) {
    Json doc;
    doc["name"] = cfg.name;
    doc["nodes"] = Json::array();
    for (const auto& n : cfg.nodes) {
        Json node{{"id", n.id}};
        if (!n.statements.empty()) node["statements"] = n.statements;
        if (n.condition) node["condition"] = *n.condition;
        doc["nodes"].push_back(std::move(node));
    }
    doc["edges"] = Json::array();
    for (const auto& e : cfg.edges)
        doc["edges"].push_back({{"from", e.from}, {"to", e.to}, {"label", to_string(e.label)}});
    doc["entry"] = cfg.entry;
    doc["exit"] = cfg.exit;
    return doc;
}

}  // namespace vcp::codemetrics
