#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mrct/congest.hpp"
#include "mrct/graph.hpp"

namespace mrct::oracle {

class BudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dense (n + 1) x (n + 1) table; row and column 0 are unused.
class DistanceMatrix {
public:
    explicit DistanceMatrix(std::size_t n) : n_(n), d_((n + 1) * (n + 1), kInfiniteCost) {}

    std::size_t size() const noexcept { return n_; }
    Cost operator()(NodeId u, NodeId v) const { return d_[u * (n_ + 1) + v]; }
    Cost& at(NodeId u, NodeId v) { return d_[u * (n_ + 1) + v]; }

private:
    std::size_t n_;
    std::vector<Cost> d_;
};

/// Floyd-Warshall; unreachable pairs stay at kInfiniteCost.
DistanceMatrix apsp(std::size_t n, std::span<const Edge> edges);
DistanceMatrix apsp(const Graph& g);

/// Sum of d(u, v) over ordered pairs of distinct terminals.
Cost rc_exact(const DistanceMatrix& d, std::span<const NodeId> terminals);
Cost rc_exact(const Graph& g, const TerminalSet& terminals);
/// Same sum measured inside the spanning tree given by `tree`.
Cost rc_exact(const Graph& g, const ParentMap& tree, const TerminalSet& terminals);

Cost ssrc_exact(const DistanceMatrix& d, std::span<const NodeId> terminals, NodeId v);

std::vector<Edge> tree_edges(const Graph& g, const ParentMap& tree);

struct ExactMrct {
    Cost cost = kInfiniteCost;
    std::vector<Edge> tree;
    std::uint64_t trees_enumerated = 0;
};

inline constexpr std::size_t kExactMaxNodes = 9;
inline constexpr std::size_t kExactMaxEdges = 14;

/// Minimum routing-cost spanning tree by exhaustive enumeration. Refuses
/// graphs with more than 9 nodes unless they have at most 14 edges.
ExactMrct mrct_exact(const Graph& g, const TerminalSet& terminals);

/// Shortest-path tree from `root`; among equally short parents the smallest ID wins.
ParentMap bfs_tree_reference(const Graph& g, NodeId root);

}  // namespace mrct::oracle
