#pragma once

#include "vcp/codemetrics/cfg.hpp"
#include "vcp/json_io.hpp"

namespace vcp::codemetrics {

/// CFG interchange document: {name?, nodes: [id | {id, ...}], edges:
/// [{from, to, label}], entry, exit}. The result is validated.
ControlFlowGraph cfg_from_json(const Json& doc, const std::string& where);
Json cfg_to_json(const ControlFlowGraph& cfg);

}  // namespace vcp::codemetrics
