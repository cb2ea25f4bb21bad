#pragma once

#include <cstddef>
#include <map>
#include <string>

#include "vcp/codemetrics/ast.hpp"
#include "vcp/codemetrics/cfg.hpp"

namespace vcp::codemetrics {

inline constexpr const char* kEntropyDefinition = "per-decision-site, uniform branching";
inline constexpr const char* kEntropyLoopPolicy =
    "loops contribute once via their guard node; iteration counts are not modeled";
inline constexpr const char* kClassifierTableVersion = "vcp-halstead-1";

/// Operator/operand classification used by halstead(), in a form suitable
/// for output metadata.
const char* halstead_classifier_table();

struct HalsteadCounts {
    std::size_t n1 = 0;  ///< distinct operators
    std::size_t n2 = 0;  ///< distinct operands
    std::size_t N1 = 0;  ///< total operators
    std::size_t N2 = 0;  ///< total operands
    double volume_v = 0.0;  ///< (N1 + N2) * log2(n1 + n2), bits
};

/// Token-level tallies behind HalsteadCounts, keyed by classifier token.
struct HalsteadTally {
    std::map<std::string, std::size_t> operators;
    std::map<std::string, std::size_t> operands;
};

struct CodeMetrics {
    long cc = 1;
    HalsteadCounts halstead;
    double h_c = 0.0;
};

/// E - N + 2.
long cyclomatic_complexity(const ControlFlowGraph& cfg);

/// Number of if/while/for conditions in live code, counted on the AST.
/// Agrees with cyclomatic_complexity(build_cfg(unit)) - 1.
long decision_points(const SourceUnit& unit);

HalsteadTally halstead_tally(const SourceUnit& unit);
HalsteadCounts halstead(const SourceUnit& unit);

/// Sum over branch nodes of log2(out-degree).
double cfg_entropy(const ControlFlowGraph& cfg);

CodeMetrics metrics(const SourceUnit& unit);

/// Metrics for a CFG supplied directly; Halstead counts are unavailable and
/// left zero.
CodeMetrics metrics(const ControlFlowGraph& cfg);

}  // namespace vcp::codemetrics
