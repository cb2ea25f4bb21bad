#include "vcp/codemetrics/cfg.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "vcp/codemetrics/parser.hpp"
#include "vcp/error.hpp"

namespace vcp::codemetrics {

const char* to_string(EdgeLabel label) {
    switch (label) {
        case EdgeLabel::Seq: return "seq";
        case EdgeLabel::True: return "true";
        case EdgeLabel::False: return "false";
        case EdgeLabel::LoopBack: return "loop-back";
        case EdgeLabel::LoopExit: return "loop-exit";
    }
    return "?";
}

std::optional<EdgeLabel> edge_label_from_string(std::string_view text) {
    for (auto l : {EdgeLabel::Seq, EdgeLabel::True, EdgeLabel::False, EdgeLabel::LoopBack,
                   EdgeLabel::LoopExit})
        if (text == to_string(l)) return l;
    return std::nullopt;
}

std::size_t ControlFlowGraph::out_degree(int node) const {
    return static_cast<std::size_t>(
        std::count_if(edges.begin(), edges.end(), [&](const CfgEdge& e) { return e.from == node; }));
}

std::size_t ControlFlowGraph::in_degree(int node) const {
    return static_cast<std::size_t>(
        std::count_if(edges.begin(), edges.end(), [&](const CfgEdge& e) { return e.to == node; }));
}

std::vector<int> ControlFlowGraph::branch_nodes() const {
    std::unordered_map<int, std::size_t> degree;
    for (const auto& e : edges) ++degree[e.from];
    std::vector<int> out;
    for (const auto& n : nodes)
        if (degree[n.id] >= 2) out.push_back(n.id);
    std::sort(out.begin(), out.end());
    return out;
}

const CfgNode* ControlFlowGraph::find(int id) const {
    for (const auto& n : nodes)
        if (n.id == id) return &n;
    return nullptr;
}

namespace {

std::unordered_set<int> reach(const ControlFlowGraph& g, int start, bool forward) {
    std::unordered_map<int, std::vector<int>> adjacency;
    for (const auto& e : g.edges) {
        if (forward) adjacency[e.from].push_back(e.to);
        else adjacency[e.to].push_back(e.from);
    }
    std::unordered_set<int> seen{start};
    std::vector<int> stack{start};
    while (!stack.empty()) {
        const int at = stack.back();
        stack.pop_back();
        const auto it = adjacency.find(at);
        if (it == adjacency.end()) continue;
        for (int to : it->second)
            if (seen.insert(to).second) stack.push_back(to);
    }
    return seen;
}

}  // namespace

void ControlFlowGraph::validate() const {
    auto fail = [&](const std::string& what) {
        throw ValidationError("invalid CFG '" + name + "': " + what);
    };
    std::unordered_set<int> ids;
    for (const auto& n : nodes)
        if (!ids.insert(n.id).second) fail("duplicate node id " + std::to_string(n.id));
    if (!ids.count(entry)) fail("entry node " + std::to_string(entry) + " not in nodes");
    if (!ids.count(exit)) fail("exit node " + std::to_string(exit) + " not in nodes");
    for (const auto& e : edges) {
        if (!ids.count(e.from) || !ids.count(e.to))
            fail("edge " + std::to_string(e.from) + "->" + std::to_string(e.to) +
                 " references an unknown node");
        if (e.to == entry && e.label == EdgeLabel::Seq) fail("seq edge enters the entry node");
    }
    const auto forward = reach(*this, entry, true);
    const auto backward = reach(*this, exit, false);
    for (const auto& n : nodes) {
        if (!forward.count(n.id)) fail("node " + std::to_string(n.id) + " unreachable from entry");
        if (!backward.count(n.id)) fail("exit unreachable from node " + std::to_string(n.id));
    }
    std::unordered_map<int, std::size_t> degree;
    for (const auto& e : edges) ++degree[e.from];
    for (const auto& e : edges) {
        if ((e.label == EdgeLabel::True || e.label == EdgeLabel::False ||
             e.label == EdgeLabel::LoopExit) &&
            degree[e.from] < 2)
            fail("branch node " + std::to_string(e.from) + " has out-degree < 2");
    }
}

namespace {

class CfgBuilder {
public:
    explicit CfgBuilder(const SourceUnit& unit) {
        graph_.name = unit.name;
        graph_.entry = add(CfgNode::Kind::Entry);
        graph_.exit = add(CfgNode::Kind::Exit);
        current_ = add(CfgNode::Kind::Block);
        link(graph_.entry, current_, EdgeLabel::Seq);
        sequence(unit.statements);
        if (live()) link(current_, graph_.exit, EdgeLabel::Seq);
    }

    ControlFlowGraph take() { return std::move(graph_); }

private:
    static constexpr int kDead = -1;

    bool live() const { return current_ != kDead; }

    int add(CfgNode::Kind kind) {
        CfgNode n;
        n.id = static_cast<int>(graph_.nodes.size());
        n.kind = kind;
        graph_.nodes.push_back(std::move(n));
        return graph_.nodes.back().id;
    }

    void link(int from, int to, EdgeLabel label) { graph_.edges.push_back({from, to, label}); }

    CfgNode& node(int id) { return graph_.nodes[static_cast<std::size_t>(id)]; }

    bool empty(int id) {
        const auto& n = node(id);
        return n.statements.empty() && !n.condition;
    }

    void append(const std::string& text) { node(current_).statements.push_back(text); }

    std::string assign_text(const Assign& a) { return a.target + " = " + pretty_print(*a.value); }

    void sequence(const std::vector<StmtPtr>& stmts) {
        for (const auto& s : stmts) {
            if (!live()) return;
            statement(*s);
        }
    }

    void statement(const Stmt& s) {
        switch (s.kind) {
            case Stmt::Kind::Assign: append(assign_text(s.assign)); break;
            case Stmt::Kind::Call: append(pretty_print(*s.expr)); break;
            case Stmt::Kind::Return:
                append(s.expr ? "return " + pretty_print(*s.expr) : "return");
                link(current_, graph_.exit, EdgeLabel::Seq);
                current_ = kDead;
                break;
            case Stmt::Kind::Block: sequence(s.body); break;
            case Stmt::Kind::If: if_statement(s); break;
            case Stmt::Kind::While:
            case Stmt::Kind::For: loop(s); break;
        }
    }

    void if_statement(const Stmt& s) {
        const int branch = current_;
        node(branch).condition = pretty_print(*s.expr);

        current_ = add(CfgNode::Kind::Block);
        link(branch, current_, EdgeLabel::True);
        sequence(s.body);
        const int then_end = current_;

        int else_end = branch;  // no else: false edge goes straight to the join
        if (s.has_else) {
            current_ = add(CfgNode::Kind::Block);
            link(branch, current_, EdgeLabel::False);
            sequence(s.orelse);
            else_end = current_;
        }

        if (then_end == kDead && else_end == kDead) {
            current_ = kDead;
            return;
        }
        const int join = add(CfgNode::Kind::Block);
        if (then_end != kDead) link(then_end, join, EdgeLabel::Seq);
        if (else_end != kDead) link(else_end, join, s.has_else ? EdgeLabel::Seq : EdgeLabel::False);
        current_ = join;
    }

    void loop(const Stmt& s) {
        if (s.kind == Stmt::Kind::For) append(assign_text(s.init));
        int guard = current_;
        if (!empty(guard)) {
            guard = add(CfgNode::Kind::Block);
            link(current_, guard, EdgeLabel::Seq);
        }
        node(guard).condition = pretty_print(*s.expr);

        current_ = add(CfgNode::Kind::Block);
        link(guard, current_, EdgeLabel::True);
        sequence(s.body);
        if (live()) {
            if (s.kind == Stmt::Kind::For) append(assign_text(s.update));
            link(current_, guard, EdgeLabel::LoopBack);
        }
        current_ = add(CfgNode::Kind::Block);
        link(guard, current_, EdgeLabel::LoopExit);
    }

    ControlFlowGraph graph_;
    int current_ = kDead;
};

}  // namespace

ControlFlowGraph build_cfg(const SourceUnit& unit) { return CfgBuilder(unit).take(); }

}  // namespace vcp::codemetrics
