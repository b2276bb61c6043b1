#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "json.hpp"
#include "mrct/congest.hpp"
#include "mrct/graph.hpp"

namespace mrct {

class CorrectnessViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A report reached a node after that node had already forwarded its own.
class ScheduleViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// What the leader learns from its wave-and-echo, plus what every node knows
/// about its own position in the leader's shortest-path tree.
struct LeaderInfo {
    NodeId leader = 1;
    Cost d_prime = 0;  ///< eccentricity of the leader
    std::size_t node_count = 0;
    std::size_t terminal_count = 0;
    ParentMap tree;          ///< shortest-path tree rooted at the leader
    std::vector<Cost> dist;  ///< distance to the leader, by node ID
    ExecutionReport report;
};

/// Wave from node 1 with echo back; aggregates max distance, n and |S|.
LeaderInfo leader_echo(RoundEngine& engine, const TerminalSet& terminals);

/// Leader pushes `fields` down its tree; every node ends up with a copy.
BroadcastResult announce(RoundEngine& engine, const LeaderInfo& leader, Message fields);

struct DPrime {
    LeaderInfo leader;
    std::vector<Cost> at_node;  ///< D' as learned by each node
    ExecutionReport broadcast_report;

    Cost value() const noexcept { return leader.d_prime; }
};

/// D' = ecc(leader), with D <= 2 D' and D' <= D, known to every node.
DPrime compute_dprime(RoundEngine& engine, const TerminalSet& terminals);

struct RootEntry {
    Cost omega = kInfiniteCost;
    Slot tau = 0;                            ///< slot in which omega was last lowered
    std::optional<std::size_t> parent_edge;  ///< empty at the root itself
};

/// Entries are indexed like SpTrees::roots.
struct TreeTable {
    std::vector<RootEntry> entries;
};

struct SpTrees {
    std::vector<NodeId> roots;
    Cost d_prime = 0;
    Slot budget = 0;                ///< |roots| + 2 D'
    std::vector<TreeTable> tables;  ///< by node ID, entry 0 unused
    ExecutionReport report;

    std::optional<std::size_t> root_index(NodeId root) const;
    const RootEntry& entry(NodeId u, std::size_t root_index) const { return tables[u].entries[root_index]; }
    NodeId parent(const Graph& g, NodeId u, std::size_t root_index) const;
    ParentMap tree_of(const Graph& g, std::size_t root_index) const;
    Slot max_tau() const;
};

/// Builds one shortest-path tree per root in exactly |roots| + 2 D' slots.
/// Throws CorrectnessViolation when some node is left without a distance.
SpTrees build_trees(RoundEngine& engine, const TerminalSet& roots, Cost d_prime);

nlohmann::json tree_tables_json(const SpTrees& trees);

struct Ssrc {
    std::vector<Cost> by_root;  ///< sum of distances from each root to S
    ExecutionReport report;
};

/// Convergecast of omega over every tree, scheduled on the reversed tau order.
Ssrc compute_ssrc(RoundEngine& engine, const SpTrees& trees, const TerminalSet& terminals);

/// Sum over S of a root's own omega row; only defined when S is a subset of the roots.
std::optional<Cost> local_ssrc(const SpTrees& trees, const TerminalSet& terminals, std::size_t root_index);

}  // namespace mrct
