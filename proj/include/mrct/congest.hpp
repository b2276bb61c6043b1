#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mrct/graph.hpp"

namespace mrct {

using Slot = std::uint64_t;

/// Bits needed for one field: ceil(log2(value + 2)).
std::size_t field_bits(std::uint64_t value) noexcept;

struct Message {
    std::vector<std::uint64_t> fields;

    Message() = default;
    Message(std::initializer_list<std::uint64_t> values) : fields(values) {}

    std::size_t bit_size() const noexcept;
    std::size_t size() const noexcept { return fields.size(); }
    std::uint64_t operator[](std::size_t i) const { return fields.at(i); }
};

/// A message handed to a node: `edge` is the receiver-local edge index.
struct Inbound {
    std::size_t edge;
    Message message;
};

class ProtocolViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class BandwidthViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class Outbox {
public:
    explicit Outbox(std::size_t degree) : degree_(degree) {}

    void send(std::size_t edge, Message message);
    void send_all(const Message& message, std::optional<std::size_t> except = std::nullopt);

    std::span<const std::pair<std::size_t, Message>> pending() const noexcept { return pending_; }
    void clear() noexcept { pending_.clear(); }

private:
    std::size_t degree_;
    std::vector<std::pair<std::size_t, Message>> pending_;
};

/// What a node knows about itself before any communication.
struct LocalView {
    NodeId id;
    std::span<const Neighbor> neighbors;

    std::size_t degree() const noexcept { return neighbors.size(); }
    Delay delay(std::size_t edge) const { return neighbors[edge].delay; }
};

/// Per-node state machine. `step` is called once per slot while the program
/// has not halted. The inbox holds every message whose traversal finished at
/// the end of the previous slot (a send in slot t over delay w shows up in the
/// inbox of slot t + w). Programs see only their own state and inbox.
class NodeProgram {
public:
    virtual ~NodeProgram() = default;
    virtual void step(Slot slot, std::span<const Inbound> inbox, Outbox& out) = 0;
    virtual bool halted() const = 0;
};

using ProgramList = std::vector<std::unique_ptr<NodeProgram>>;

struct EngineOptions {
    /// Per-message budget B in bits; 0 selects 8 * ceil(log2 n).
    std::size_t bandwidth_bits = 0;
    /// Step handlers of one slot may run on several threads; results are
    /// identical to the single-threaded order.
    unsigned threads = 1;
};

struct ExecutionReport {
    Slot rounds_used = 0;
    std::size_t max_edge_bits = 0;
    std::uint64_t messages_total = 0;
    std::uint64_t messages_dropped = 0;
    bool halted_all = false;

    /// Slots charged when phases are chained: the trailing delivery-only slot
    /// doubles as the first slot of the next phase.
    Slot charged_slots() const noexcept { return rounds_used == 0 ? 0 : rounds_used - 1; }
};

std::size_t default_bandwidth(std::size_t n) noexcept;

/// Synchronous slot engine for one graph. Each `run` executes one phase with
/// a fresh set of programs, starting at slot 1.
class RoundEngine {
public:
    explicit RoundEngine(const Graph& graph, EngineOptions options = {});

    const Graph& graph() const noexcept { return *graph_; }
    std::size_t bandwidth() const noexcept { return bandwidth_; }
    LocalView view(NodeId u) const { return {u, graph_->neighbors(u)}; }

    /// Programs are indexed by node ID - 1.
    ExecutionReport run(ProgramList& programs, Slot max_slots);

private:
    const Graph* graph_;
    std::size_t bandwidth_;
    unsigned threads_;
};

/// Parent of each node (indexed by node ID, entry 0 unused); kNoNode marks the root.
using ParentMap = std::vector<NodeId>;

class StructureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Validates that `parents` describes a spanning tree of `g` made of graph
/// edges and returns its root.
NodeId validate_tree(const Graph& g, const ParentMap& parents);

struct BroadcastResult {
    std::vector<std::optional<Message>> payload;  ///< by node ID
    std::vector<Slot> received_in;                ///< slot of receipt, 0 at the source
    ExecutionReport report;

    std::optional<std::uint64_t> value(NodeId u) const;
};

BroadcastResult flood_broadcast(RoundEngine& engine, NodeId source, std::uint64_t value);
BroadcastResult tree_broadcast(RoundEngine& engine, const ParentMap& tree, Message payload);
inline BroadcastResult tree_broadcast(RoundEngine& engine, const ParentMap& tree, std::uint64_t value) {
    return tree_broadcast(engine, tree, Message{value});
}

struct ConvergecastMinResult {
    std::optional<std::uint64_t> value;
    NodeId arg = kNoNode;
    ExecutionReport report;
};

struct ConvergecastSumResult {
    std::uint64_t value = 0;
    ExecutionReport report;
};

/// Leaves-to-root minimum with argmin; ties go to the smaller node ID. Nodes
/// without a value contribute nothing.
ConvergecastMinResult convergecast_min(RoundEngine& engine, const ParentMap& tree,
                                       const std::vector<std::optional<std::uint64_t>>& values);
ConvergecastSumResult convergecast_sum(RoundEngine& engine, const ParentMap& tree,
                                       const std::vector<std::uint64_t>& values);

/// Children of every node, as edge indices local to that node.
std::vector<std::vector<std::size_t>> child_edges(const Graph& g, const ParentMap& tree);

}  // namespace mrct
