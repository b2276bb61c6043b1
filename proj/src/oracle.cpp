#include "mrct/oracle.hpp"

#include <functional>
#include <string>

namespace mrct::oracle {

DistanceMatrix apsp(std::size_t n, std::span<const Edge> edges) {
    DistanceMatrix d(n);
    for (NodeId u = 1; u <= n; ++u) d.at(u, u) = 0;
    for (const auto& e : edges) {
        Cost w = e.delay;
        if (w < d(e.u, e.v)) {
            d.at(e.u, e.v) = w;
            d.at(e.v, e.u) = w;
        }
    }
    for (NodeId k = 1; k <= n; ++k) {
        for (NodeId i = 1; i <= n; ++i) {
            Cost dik = d(i, k);
            if (dik == kInfiniteCost) continue;
            for (NodeId j = 1; j <= n; ++j) {
                Cost dkj = d(k, j);
                if (dkj == kInfiniteCost) continue;
                if (dik + dkj < d(i, j)) d.at(i, j) = dik + dkj;
            }
        }
    }
    return d;
}

DistanceMatrix apsp(const Graph& g) {
    auto edges = g.edges();
    return apsp(g.node_count(), edges);
}

Cost rc_exact(const DistanceMatrix& d, std::span<const NodeId> terminals) {
    Cost sum = 0;
    for (NodeId u : terminals) {
        for (NodeId v : terminals) {
            if (u == v) continue;
            if (d(u, v) == kInfiniteCost) throw BudgetExceeded("terminals are disconnected");
            sum += d(u, v);
        }
    }
    return sum;
}

Cost rc_exact(const Graph& g, const TerminalSet& terminals) {
    return rc_exact(apsp(g), terminals.members());
}

std::vector<Edge> tree_edges(const Graph& g, const ParentMap& tree) {
    validate_tree(g, tree);
    std::vector<Edge> edges;
    for (NodeId u = 1; u <= g.node_count(); ++u) {
        if (tree[u] != kNoNode) edges.push_back({u, tree[u], g.delay(u, tree[u])});
    }
    return edges;
}

Cost rc_exact(const Graph& g, const ParentMap& tree, const TerminalSet& terminals) {
    auto edges = tree_edges(g, tree);
    return rc_exact(apsp(g.node_count(), edges), terminals.members());
}

Cost ssrc_exact(const DistanceMatrix& d, std::span<const NodeId> terminals, NodeId v) {
    Cost sum = 0;
    for (NodeId u : terminals) sum += d(v, u);
    return sum;
}

namespace {

class RollbackDsu {
public:
    explicit RollbackDsu(std::size_t n) : parent_(n + 1), size_(n + 1, 1) {
        for (std::size_t i = 0; i <= n; ++i) parent_[i] = static_cast<NodeId>(i);
    }

    NodeId find(NodeId x) const {
        while (parent_[x] != x) x = parent_[x];
        return x;
    }

    bool unite(NodeId a, NodeId b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (size_[a] < size_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
        history_.push_back(b);
        return true;
    }

    void undo() {
        NodeId b = history_.back();
        history_.pop_back();
        NodeId a = parent_[b];
        size_[a] -= size_[b];
        parent_[b] = b;
    }

private:
    std::vector<NodeId> parent_;
    std::vector<std::size_t> size_;
    std::vector<NodeId> history_;
};

// Tree distances from each terminal by walking the adjacency of the chosen edges.
Cost tree_cost(std::size_t n, const std::vector<Edge>& chosen, std::span<const NodeId> terminals) {
    std::vector<std::vector<std::pair<NodeId, Cost>>> adj(n + 1);
    for (const auto& e : chosen) {
        adj[e.u].push_back({e.v, e.delay});
        adj[e.v].push_back({e.u, e.delay});
    }
    std::vector<Cost> dist(n + 1);
    std::vector<NodeId> stack;
    std::vector<NodeId> from(n + 1);
    Cost total = 0;
    for (NodeId s : terminals) {
        dist[s] = 0;
        from[s] = kNoNode;
        stack.assign(1, s);
        while (!stack.empty()) {
            NodeId x = stack.back();
            stack.pop_back();
            for (auto [y, w] : adj[x]) {
                if (y == from[x]) continue;
                from[y] = x;
                dist[y] = dist[x] + w;
                stack.push_back(y);
            }
        }
        for (NodeId t : terminals) total += dist[t];
    }
    return total;
}

}  // namespace

ExactMrct mrct_exact(const Graph& g, const TerminalSet& terminals) {
    const std::size_t n = g.node_count();
    const auto edges = g.edges();
    if (n > kExactMaxNodes && edges.size() > kExactMaxEdges) {
        throw BudgetExceeded("exact search refused: n = " + std::to_string(n) +
                             ", m = " + std::to_string(edges.size()));
    }
    ExactMrct best;
    RollbackDsu dsu(n);
    std::vector<Edge> chosen;
    chosen.reserve(n - 1);

    std::function<void(std::size_t)> search = [&](std::size_t next) {
        if (chosen.size() == n - 1) {
            ++best.trees_enumerated;
            Cost c = tree_cost(n, chosen, terminals.members());
            if (c < best.cost) {
                best.cost = c;
                best.tree = chosen;
            }
            return;
        }
        if (edges.size() - next < (n - 1) - chosen.size()) return;
        const Edge& e = edges[next];
        if (dsu.unite(e.u, e.v)) {
            chosen.push_back(e);
            search(next + 1);
            chosen.pop_back();
            dsu.undo();
        }
        search(next + 1);
    };
    search(0);
    return best;
}

ParentMap bfs_tree_reference(const Graph& g, NodeId root) {
    auto d = apsp(g);
    ParentMap tree(g.node_count() + 1, kNoNode);
    for (NodeId u = 1; u <= g.node_count(); ++u) {
        if (u == root) continue;
        for (const auto& nb : g.neighbors(u)) {
            if (d(root, nb.id) + nb.delay == d(root, u)) {
                tree[u] = nb.id;
                break;
            }
        }
    }
    return tree;
}

}  // namespace mrct::oracle
