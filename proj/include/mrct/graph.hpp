#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mrct {

using NodeId = std::uint32_t;
using Delay = std::uint32_t;
using Cost = std::int64_t;

inline constexpr Cost kInfiniteCost = std::numeric_limits<Cost>::max();
inline constexpr NodeId kNoNode = 0;

class GraphError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public GraphError {
public:
    ParseError(std::size_t line, const std::string& what);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

struct Neighbor {
    NodeId id;
    Delay delay;
};

struct Edge {
    NodeId u;
    NodeId v;
    Delay delay;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Undirected connected graph with node IDs 1..n and positive integer edge
/// delays. Adjacency lists are kept sorted by neighbor ID; the position of a
/// neighbor in that list is the node's local "edge index".
class Graph {
public:
    static Graph from_edges(std::size_t n, std::span<const Edge> edges);

    std::size_t node_count() const noexcept { return adjacency_.size(); }
    std::size_t edge_count() const noexcept { return edge_count_; }

    std::span<const Neighbor> neighbors(NodeId u) const;
    std::size_t degree(NodeId u) const { return neighbors(u).size(); }

    /// Edge index of v in u's adjacency, or npos when not adjacent.
    std::size_t edge_index(NodeId u, NodeId v) const;
    bool has_edge(NodeId u, NodeId v) const { return edge_index(u, v) != npos; }
    Delay delay(NodeId u, NodeId v) const;

    /// Canonical edge list: u < v, sorted by (u, v).
    std::vector<Edge> edges() const;
    bool unit_delays() const noexcept { return max_delay_ == 1; }
    Delay max_delay() const noexcept { return max_delay_; }
    bool contains(NodeId u) const noexcept { return u >= 1 && u <= node_count(); }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    Graph() = default;

    std::vector<std::vector<Neighbor>> adjacency_;
    std::size_t edge_count_ = 0;
    Delay max_delay_ = 1;
};

/// Sorted, duplicate-free terminal set S with |S| >= 2.
class TerminalSet {
public:
    TerminalSet(const Graph& g, std::vector<NodeId> members);

    static TerminalSet all(const Graph& g);

    std::span<const NodeId> members() const noexcept { return members_; }
    std::size_t size() const noexcept { return members_.size(); }
    bool contains(NodeId u) const;
    /// Membership indexed by node ID (entry 0 unused).
    const std::vector<bool>& mask() const noexcept { return mask_; }

private:
    std::vector<NodeId> members_;
    std::vector<bool> mask_;
};

enum class GraphKind { clique, path, grid, random_connected, star, cycle, random_tree };

GraphKind parse_graph_kind(std::string_view name);
std::string_view to_string(GraphKind kind);

struct GenerateOptions {
    double p = 0.5;
    std::uint64_t seed = 1;
    Delay max_delay = 1;
};

Graph generate(GraphKind kind, std::size_t n, const GenerateOptions& options = {});

Graph load_edge_list(std::string_view text);
std::string save_edge_list(const Graph& g);

/// Single-source delay-weighted distances (Dijkstra), indexed by node ID.
std::vector<Cost> distances_from(const Graph& g, NodeId source);
Cost eccentricity(const Graph& g, NodeId u);
Cost weighted_diameter(const Graph& g);

}  // namespace mrct
