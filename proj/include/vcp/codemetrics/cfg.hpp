#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vcp/codemetrics/ast.hpp"

namespace vcp::codemetrics {

enum class EdgeLabel { Seq, True, False, LoopBack, LoopExit };

const char* to_string(EdgeLabel label);
std::optional<EdgeLabel> edge_label_from_string(std::string_view text);

struct CfgNode {
    enum class Kind { Entry, Exit, Block };

    int id = 0;
    Kind kind = Kind::Block;
    std::vector<std::string> statements;  ///< canonical text of straight-line statements
    std::optional<std::string> condition;  ///< set on branch nodes built from source
};

struct CfgEdge {
    int from = 0;
    int to = 0;
    EdgeLabel label = EdgeLabel::Seq;

    friend bool operator==(const CfgEdge&, const CfgEdge&) = default;
};

/// Directed control-flow graph with a unique entry and exit.
///
/// Invariants (checked by validate()): no seq edge enters the entry node;
/// every node is reachable from entry; exit is reachable from every node;
/// any node with a true/false/loop-exit out-edge has out-degree >= 2.
struct ControlFlowGraph {
    std::string name;
    std::vector<CfgNode> nodes;
    std::vector<CfgEdge> edges;
    int entry = 0;
    int exit = 1;

    std::size_t out_degree(int node) const;
    std::size_t in_degree(int node) const;
    /// Nodes with out-degree >= 2, in id order.
    std::vector<int> branch_nodes() const;
    const CfgNode* find(int id) const;

    /// Throws ValidationError naming the violated invariant.
    void validate() const;
};

/// Builds the whole-unit CFG. Statements after a `return` (or after an
/// if/else whose branches all return) are dead and are not emitted.
ControlFlowGraph build_cfg(const SourceUnit& unit);

}  // namespace vcp::codemetrics
