#pragma once

#include <vector>

#include "json.hpp"
#include "mrct/congest.hpp"
#include "mrct/sptrees.hpp"

namespace mrct {

/// Contribution of the edge from a child (whose subtree holds `z` terminals)
/// to its parent: 2 * delay * z * (|S| - z). Throws std::overflow_error.
Cost rc_formula(std::uint64_t z, std::uint64_t terminal_count, Delay delay);

/// Per-node partial sums, indexed like SpTrees::roots.
struct CostTable {
    std::vector<Cost> rc;
    std::vector<std::uint64_t> z;
};

struct RoutingCosts {
    std::vector<NodeId> roots;
    std::vector<Cost> rc;           ///< RC_S(T_v) as computed at each root v
    std::vector<CostTable> tables;  ///< by node ID, entry 0 unused
    ExecutionReport report;
};

struct CostWaveOptions {
    /// Seeds this node with the wrong membership bit (test hook).
    NodeId corrupt_z_at = kNoNode;
};

/// Routing cost of every shortest-path tree, in exactly budget slots.
RoutingCosts compute_all_rc(RoundEngine& engine, const SpTrees& trees, const TerminalSet& terminals,
                            CostWaveOptions options = {});

/// Recomputes RC_S(T_v) centrally on the extracted tree and compares.
bool oracle_rc_check(const Graph& g, const SpTrees& trees, const TerminalSet& terminals,
                     std::size_t root_index, Cost claimed);

/// {root: {rc, ssrc}}; ssrc is null when not supplied.
nlohmann::json routing_costs_json(const RoutingCosts& costs, const std::vector<Cost>* ssrc = nullptr);

}  // namespace mrct
