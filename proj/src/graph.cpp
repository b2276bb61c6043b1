#include "mrct/graph.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <queue>
#include <random>
#include <sstream>

namespace mrct {

ParseError::ParseError(std::size_t line, const std::string& what)
    : GraphError("line " + std::to_string(line) + ": " + what), line_(line) {}

namespace {

bool is_connected(const std::vector<std::vector<Neighbor>>& adjacency) {
    if (adjacency.empty()) {
        return false;
    }
    std::vector<bool> seen(adjacency.size() + 1, false);
    std::vector<NodeId> stack{1};
    seen[1] = true;
    std::size_t reached = 1;
    while (!stack.empty()) {
        NodeId u = stack.back();
        stack.pop_back();
        for (const auto& nb : adjacency[u - 1]) {
            if (!seen[nb.id]) {
                seen[nb.id] = true;
                ++reached;
                stack.push_back(nb.id);
            }
        }
    }
    return reached == adjacency.size();
}

}  // namespace

Graph Graph::from_edges(std::size_t n, std::span<const Edge> edges) {
    if (n < 2) {
        throw GraphError("graph needs at least 2 nodes, got " + std::to_string(n));
    }
    Graph g;
    g.adjacency_.resize(n);
    for (const auto& e : edges) {
        if (e.u < 1 || e.u > n || e.v < 1 || e.v > n) {
            throw GraphError("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                             ") references a node outside 1.." + std::to_string(n));
        }
        if (e.u == e.v) {
            throw GraphError("self-loop at node " + std::to_string(e.u));
        }
        if (e.delay < 1) {
            throw GraphError("delay must be >= 1 on edge (" + std::to_string(e.u) + "," +
                             std::to_string(e.v) + ")");
        }
        g.adjacency_[e.u - 1].push_back({e.v, e.delay});
        g.adjacency_[e.v - 1].push_back({e.u, e.delay});
        g.max_delay_ = std::max(g.max_delay_, e.delay);
    }
    for (std::size_t i = 0; i < n; ++i) {
        auto& adj = g.adjacency_[i];
        std::sort(adj.begin(), adj.end(),
                  [](const Neighbor& a, const Neighbor& b) { return a.id < b.id; });
        auto dup = std::adjacent_find(adj.begin(), adj.end(), [](const Neighbor& a, const Neighbor& b) {
            return a.id == b.id;
        });
        if (dup != adj.end()) {
            throw GraphError("duplicate edge (" + std::to_string(i + 1) + "," +
                             std::to_string(dup->id) + ")");
        }
    }
    g.edge_count_ = edges.size();
    if (!is_connected(g.adjacency_)) {
        throw GraphError("graph is not connected");
    }
    return g;
}

std::span<const Neighbor> Graph::neighbors(NodeId u) const {
    if (!contains(u)) {
        throw GraphError("node " + std::to_string(u) + " out of range");
    }
    return adjacency_[u - 1];
}

std::size_t Graph::edge_index(NodeId u, NodeId v) const {
    auto adj = neighbors(u);
    auto it = std::lower_bound(adj.begin(), adj.end(), v,
                               [](const Neighbor& nb, NodeId id) { return nb.id < id; });
    if (it == adj.end() || it->id != v) {
        return npos;
    }
    return static_cast<std::size_t>(it - adj.begin());
}

Delay Graph::delay(NodeId u, NodeId v) const {
    std::size_t i = edge_index(u, v);
    if (i == npos) {
        throw GraphError("nodes " + std::to_string(u) + " and " + std::to_string(v) +
                         " are not adjacent");
    }
    return adjacency_[u - 1][i].delay;
}

std::vector<Edge> Graph::edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count_);
    for (NodeId u = 1; u <= node_count(); ++u) {
        for (const auto& nb : adjacency_[u - 1]) {
            if (u < nb.id) {
                out.push_back({u, nb.id, nb.delay});
            }
        }
    }
    return out;
}

TerminalSet::TerminalSet(const Graph& g, std::vector<NodeId> members)
    : members_(std::move(members)), mask_(g.node_count() + 1, false) {
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
    for (NodeId u : members_) {
        if (!g.contains(u)) {
            throw GraphError("terminal " + std::to_string(u) + " is not a node of the graph");
        }
        mask_[u] = true;
    }
    if (members_.size() < 2) {
        throw GraphError("terminal set needs at least 2 members, got " +
                         std::to_string(members_.size()));
    }
}

TerminalSet TerminalSet::all(const Graph& g) {
    std::vector<NodeId> ids(g.node_count());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        ids[i] = static_cast<NodeId>(i + 1);
    }
    return TerminalSet(g, std::move(ids));
}

bool TerminalSet::contains(NodeId u) const {
    return u < mask_.size() && mask_[u];
}

GraphKind parse_graph_kind(std::string_view name) {
    if (name == "clique") return GraphKind::clique;
    if (name == "path") return GraphKind::path;
    if (name == "grid") return GraphKind::grid;
    if (name == "random_connected" || name == "random") return GraphKind::random_connected;
    if (name == "star") return GraphKind::star;
    if (name == "cycle") return GraphKind::cycle;
    if (name == "random_tree" || name == "tree") return GraphKind::random_tree;
    throw GraphError("unknown graph kind '" + std::string(name) + "'");
}

std::string_view to_string(GraphKind kind) {
    switch (kind) {
        case GraphKind::clique: return "clique";
        case GraphKind::path: return "path";
        case GraphKind::grid: return "grid";
        case GraphKind::random_connected: return "random_connected";
        case GraphKind::star: return "star";
        case GraphKind::cycle: return "cycle";
        case GraphKind::random_tree: return "random_tree";
    }
    return "unknown";
}

namespace {

std::vector<std::pair<NodeId, NodeId>> gnp_pairs(std::size_t n, double p, std::mt19937_64& rng) {
    std::bernoulli_distribution coin(p);
    std::vector<std::pair<NodeId, NodeId>> out;
    for (NodeId u = 1; u <= n; ++u) {
        for (NodeId v = u + 1; v <= n; ++v) {
            if (coin(rng)) {
                out.emplace_back(u, v);
            }
        }
    }
    return out;
}

bool pairs_connected(std::size_t n, const std::vector<std::pair<NodeId, NodeId>>& pairs) {
    std::vector<NodeId> parent(n + 1);
    for (NodeId i = 0; i <= n; ++i) parent[i] = i;
    std::function<NodeId(NodeId)> find = [&](NodeId x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    std::size_t components = n;
    for (auto [u, v] : pairs) {
        NodeId a = find(u), b = find(v);
        if (a != b) {
            parent[a] = b;
            --components;
        }
    }
    return components == 1;
}

}  // namespace

Graph generate(GraphKind kind, std::size_t n, const GenerateOptions& options) {
    if (n < 2) {
        throw GraphError("invalid size: generator needs n >= 2, got " + std::to_string(n));
    }
    if (options.max_delay < 1) {
        throw GraphError("max_delay must be >= 1");
    }
    std::mt19937_64 rng(options.seed);
    std::vector<std::pair<NodeId, NodeId>> pairs;
    switch (kind) {
        case GraphKind::clique:
            for (NodeId u = 1; u <= n; ++u)
                for (NodeId v = u + 1; v <= n; ++v) pairs.emplace_back(u, v);
            break;
        case GraphKind::path:
            for (NodeId u = 1; u < n; ++u) pairs.emplace_back(u, u + 1);
            break;
        case GraphKind::cycle:
            for (NodeId u = 1; u < n; ++u) pairs.emplace_back(u, u + 1);
            if (n > 2) pairs.emplace_back(1, static_cast<NodeId>(n));
            break;
        case GraphKind::star:
            for (NodeId u = 2; u <= n; ++u) pairs.emplace_back(1, u);
            break;
        case GraphKind::grid: {
            // Row-major layout with ceil(sqrt(n)) columns; a partial last row hangs below.
            std::size_t cols = 1;
            while (cols * cols < n) ++cols;
            for (NodeId u = 1; u <= n; ++u) {
                std::size_t col = (u - 1) % cols;
                if (col + 1 < cols && u + 1 <= n) pairs.emplace_back(u, u + 1);
                if (u + cols <= n) pairs.emplace_back(u, static_cast<NodeId>(u + cols));
            }
            break;
        }
        case GraphKind::random_tree:
            for (NodeId u = 2; u <= n; ++u) {
                std::uniform_int_distribution<NodeId> pick(1, u - 1);
                NodeId p = pick(rng);
                pairs.emplace_back(p, u);
            }
            break;
        case GraphKind::random_connected: {
            if (!(options.p > 0.0 && options.p <= 1.0)) {
                throw GraphError("edge probability must be in (0, 1]");
            }
            const std::size_t attempts = 10 * n;
            bool ok = false;
            for (std::size_t a = 0; a < attempts; ++a) {
                pairs = gnp_pairs(n, options.p, rng);
                if (pairs_connected(n, pairs)) {
                    ok = true;
                    break;
                }
            }
            if (!ok) {
                throw GraphError("generation failure: no connected G(" + std::to_string(n) + ", " +
                                 std::to_string(options.p) + ") in " + std::to_string(attempts) +
                                 " draws");
            }
            break;
        }
    }
    std::uniform_int_distribution<Delay> delay_dist(1, options.max_delay);
    std::vector<Edge> edges;
    edges.reserve(pairs.size());
    for (auto [u, v] : pairs) {
        Delay d = options.max_delay == 1 ? 1 : delay_dist(rng);
        edges.push_back({u, v, d});
    }
    return Graph::from_edges(n, edges);
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::uint64_t> parse_numbers(std::string_view line, std::size_t line_no) {
    std::vector<std::uint64_t> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        if (i >= line.size()) break;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
        std::string_view tok = line.substr(i, j - i);
        std::uint64_t value = 0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
        if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
            throw ParseError(line_no, "expected a non-negative integer, got '" + std::string(tok) + "'");
        }
        out.push_back(value);
        i = j;
    }
    return out;
}

}  // namespace

Graph load_edge_list(std::string_view text) {
    std::size_t n = 0;
    bool have_n = false;
    std::vector<Edge> edges;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            if (end == text.size()) break;
            continue;
        }
        auto nums = parse_numbers(line, line_no);
        if (!have_n) {
            if (nums.size() != 1) {
                throw ParseError(line_no, "first line must hold the node count");
            }
            n = nums[0];
            have_n = true;
        } else {
            if (nums.size() != 3) {
                throw ParseError(line_no, "expected 'u v w'");
            }
            if (nums[2] < 1) {
                throw ParseError(line_no, "delay must be >= 1");
            }
            if (nums[0] < 1 || nums[0] > n || nums[1] < 1 || nums[1] > n) {
                throw ParseError(line_no, "node id outside 1.." + std::to_string(n));
            }
            if (nums[2] > std::numeric_limits<Delay>::max()) {
                throw ParseError(line_no, "delay too large");
            }
            edges.push_back({static_cast<NodeId>(nums[0]), static_cast<NodeId>(nums[1]),
                             static_cast<Delay>(nums[2])});
        }
        if (end == text.size()) break;
    }
    if (!have_n) {
        throw ParseError(line_no, "missing node count");
    }
    return Graph::from_edges(n, edges);
}

std::string save_edge_list(const Graph& g) {
    std::ostringstream out;
    out << g.node_count() << '\n';
    for (const auto& e : g.edges()) {
        out << e.u << ' ' << e.v << ' ' << e.delay << '\n';
    }
    return out.str();
}

std::vector<Cost> distances_from(const Graph& g, NodeId source) {
    std::vector<Cost> dist(g.node_count() + 1, kInfiniteCost);
    using Item = std::pair<Cost, NodeId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    dist[source] = 0;
    queue.emplace(0, source);
    while (!queue.empty()) {
        auto [d, u] = queue.top();
        queue.pop();
        if (d > dist[u]) continue;
        for (const auto& nb : g.neighbors(u)) {
            Cost nd = d + nb.delay;
            if (nd < dist[nb.id]) {
                dist[nb.id] = nd;
                queue.emplace(nd, nb.id);
            }
        }
    }
    return dist;
}

Cost eccentricity(const Graph& g, NodeId u) {
    auto dist = distances_from(g, u);
    return *std::max_element(dist.begin() + 1, dist.end());
}

Cost weighted_diameter(const Graph& g) {
    Cost best = 0;
    for (NodeId u = 1; u <= g.node_count(); ++u) {
        best = std::max(best, eccentricity(g, u));
    }
    return best;
}

}  // namespace mrct
