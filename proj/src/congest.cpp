#include "mrct/congest.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <thread>

namespace mrct {

std::size_t field_bits(std::uint64_t value) noexcept {
    // ceil(log2(value + 2)) == bit_width(value + 1) for every value < 2^64 - 1.
    if (value == std::numeric_limits<std::uint64_t>::max()) {
        return 65;
    }
    return static_cast<std::size_t>(std::bit_width(value + 1));
}

std::size_t Message::bit_size() const noexcept {
    std::size_t bits = 0;
    for (auto f : fields) {
        bits += field_bits(f);
    }
    return bits;
}

void Outbox::send(std::size_t edge, Message message) {
    if (edge >= degree_) {
        throw ProtocolViolation("send on edge index " + std::to_string(edge) + " of a degree-" +
                                std::to_string(degree_) + " node");
    }
    pending_.emplace_back(edge, std::move(message));
}

void Outbox::send_all(const Message& message, std::optional<std::size_t> except) {
    for (std::size_t e = 0; e < degree_; ++e) {
        if (except && *except == e) continue;
        send(e, message);
    }
}

std::size_t default_bandwidth(std::size_t n) noexcept {
    std::size_t log_n = n <= 1 ? 1 : static_cast<std::size_t>(std::bit_width(n - 1));
    return 8 * log_n;
}

RoundEngine::RoundEngine(const Graph& graph, EngineOptions options)
    : graph_(&graph),
      bandwidth_(options.bandwidth_bits == 0 ? default_bandwidth(graph.node_count())
                                             : options.bandwidth_bits),
      threads_(std::max(1u, options.threads)) {}

namespace {

struct Delivery {
    NodeId dest;
    std::size_t edge;
    Message message;
};

}  // namespace

ExecutionReport RoundEngine::run(ProgramList& programs, Slot max_slots) {
    const Graph& g = *graph_;
    const std::size_t n = g.node_count();
    if (programs.size() != n) {
        throw std::invalid_argument("engine needs one program per node");
    }
    if (max_slots < 1) {
        throw std::invalid_argument("max_slots must be >= 1");
    }

    ExecutionReport report;
    std::map<Slot, std::vector<Delivery>> in_flight;
    std::vector<std::vector<Inbound>> inboxes(n);
    std::vector<Outbox> outboxes;
    outboxes.reserve(n);
    for (NodeId u = 1; u <= n; ++u) {
        outboxes.emplace_back(g.degree(u));
    }

    auto all_halted = [&] {
        return std::all_of(programs.begin(), programs.end(), [](const auto& p) { return p->halted(); });
    };

    for (Slot slot = 1; slot <= max_slots; ++slot) {
        bool activity = false;
        for (auto& box : inboxes) box.clear();
        if (auto it = in_flight.find(slot); it != in_flight.end()) {
            activity = true;
            for (auto& d : it->second) {
                if (programs[d.dest - 1]->halted()) {
                    ++report.messages_dropped;
                    continue;
                }
                inboxes[d.dest - 1].push_back({d.edge, std::move(d.message)});
            }
            in_flight.erase(it);
        }
        for (auto& box : inboxes) {
            std::stable_sort(box.begin(), box.end(),
                             [](const Inbound& a, const Inbound& b) { return a.edge < b.edge; });
        }

        std::vector<std::size_t> active;
        for (std::size_t i = 0; i < n; ++i) {
            if (!programs[i]->halted()) active.push_back(i);
        }
        if (!active.empty()) activity = true;

        auto step_range = [&](std::size_t begin, std::size_t end) {
            for (std::size_t k = begin; k < end; ++k) {
                std::size_t i = active[k];
                outboxes[i].clear();
                programs[i]->step(slot, inboxes[i], outboxes[i]);
            }
        };
        if (threads_ > 1 && active.size() > 1) {
            std::size_t workers = std::min<std::size_t>(threads_, active.size());
            std::size_t chunk = (active.size() + workers - 1) / workers;
            std::vector<std::jthread> pool;
            for (std::size_t w = 0; w < workers; ++w) {
                std::size_t begin = w * chunk;
                std::size_t end = std::min(active.size(), begin + chunk);
                if (begin < end) pool.emplace_back(step_range, begin, end);
            }
        } else {
            step_range(0, active.size());
        }

        // Outboxes are merged in node order so scheduling never affects results.
        for (std::size_t i : active) {
            NodeId u = static_cast<NodeId>(i + 1);
            auto nbrs = g.neighbors(u);
            std::vector<bool> used(nbrs.size(), false);
            for (const auto& [edge, message] : outboxes[i].pending()) {
                if (used[edge]) {
                    throw ProtocolViolation("node " + std::to_string(u) + " sent twice on edge to " +
                                            std::to_string(nbrs[edge].id) + " in slot " +
                                            std::to_string(slot));
                }
                used[edge] = true;
                std::size_t bits = message.bit_size();
                if (bits > bandwidth_) {
                    throw BandwidthViolation("node " + std::to_string(u) + " sent " +
                                             std::to_string(bits) + " bits in slot " +
                                             std::to_string(slot) + ", budget is " +
                                             std::to_string(bandwidth_));
                }
                report.max_edge_bits = std::max(report.max_edge_bits, bits);
                ++report.messages_total;
                NodeId dest = nbrs[edge].id;
                in_flight[slot + nbrs[edge].delay].push_back({dest, g.edge_index(dest, u), message});
            }
            outboxes[i].clear();
        }

        if (activity) report.rounds_used = slot;
        if (in_flight.empty() && all_halted()) {
            report.halted_all = true;
            break;
        }
    }
    return report;
}

NodeId validate_tree(const Graph& g, const ParentMap& parents) {
    const std::size_t n = g.node_count();
    if (parents.size() != n + 1) {
        throw StructureError("parent map must have n + 1 entries");
    }
    NodeId root = kNoNode;
    for (NodeId u = 1; u <= n; ++u) {
        NodeId p = parents[u];
        if (p == kNoNode) {
            if (root != kNoNode) {
                throw StructureError("parent map has two roots: " + std::to_string(root) + " and " +
                                     std::to_string(u));
            }
            root = u;
        } else if (!g.contains(p) || !g.has_edge(u, p)) {
            throw StructureError("parent of " + std::to_string(u) + " is not a neighbor");
        }
    }
    if (root == kNoNode) {
        throw StructureError("parent map has no root (cycle)");
    }
    // 0 = unvisited, 1 = on current chain, 2 = known to reach the root.
    std::vector<std::uint8_t> state(n + 1, 0);
    state[root] = 2;
    for (NodeId u = 1; u <= n; ++u) {
        std::vector<NodeId> chain;
        NodeId x = u;
        while (state[x] == 0) {
            state[x] = 1;
            chain.push_back(x);
            x = parents[x];
        }
        if (state[x] == 1) {
            throw StructureError("parent map contains a cycle through node " + std::to_string(x));
        }
        for (NodeId c : chain) state[c] = 2;
    }
    return root;
}

std::vector<std::vector<std::size_t>> child_edges(const Graph& g, const ParentMap& tree) {
    std::vector<std::vector<std::size_t>> children(g.node_count() + 1);
    for (NodeId u = 1; u <= g.node_count(); ++u) {
        if (tree[u] != kNoNode) {
            children[tree[u]].push_back(g.edge_index(tree[u], u));
        }
    }
    for (auto& c : children) std::sort(c.begin(), c.end());
    return children;
}

namespace {

class FloodProgram : public NodeProgram {
public:
    FloodProgram(LocalView view, std::optional<std::uint64_t> initial, BroadcastResult& out)
        : view_(view), value_(initial), out_(out) {}

    void step(Slot slot, std::span<const Inbound> inbox, Outbox& out) override {
        if (value_ && slot == 1) {
            out_.payload[view_.id] = Message{*value_};
            out_.received_in[view_.id] = 0;
            out.send_all(Message{*value_});
            done_ = true;
            return;
        }
        if (inbox.empty()) return;
        value_ = inbox.front().message[0];
        out_.payload[view_.id] = inbox.front().message;
        out_.received_in[view_.id] = slot - 1;
        std::vector<bool> heard(view_.degree(), false);
        for (const auto& in : inbox) heard[in.edge] = true;
        for (std::size_t e = 0; e < view_.degree(); ++e) {
            if (!heard[e]) out.send(e, Message{*value_});
        }
        done_ = true;
    }

    bool halted() const override { return done_; }

private:
    LocalView view_;
    std::optional<std::uint64_t> value_;
    BroadcastResult& out_;
    bool done_ = false;
};

class TreeBroadcastProgram : public NodeProgram {
public:
    TreeBroadcastProgram(LocalView view, bool is_root, std::vector<std::size_t> children,
                         Message payload, BroadcastResult& out)
        : view_(view), is_root_(is_root), children_(std::move(children)), payload_(std::move(payload)),
          out_(out) {}

    void step(Slot slot, std::span<const Inbound> inbox, Outbox& out) override {
        if (is_root_) {
            out_.payload[view_.id] = payload_;
            out_.received_in[view_.id] = 0;
        } else {
            if (inbox.empty()) return;
            out_.payload[view_.id] = inbox.front().message;
            out_.received_in[view_.id] = slot - 1;
        }
        for (auto e : children_) out.send(e, *out_.payload[view_.id]);
        done_ = true;
    }

    bool halted() const override { return done_; }

private:
    LocalView view_;
    bool is_root_;
    std::vector<std::size_t> children_;
    Message payload_;
    BroadcastResult& out_;
    bool done_ = false;
};

template <class Combine>
class ConvergecastProgram : public NodeProgram {
public:
    ConvergecastProgram(std::optional<std::size_t> parent_edge, std::size_t child_count,
                        std::optional<Message> own, Combine combine, std::optional<Message>& result)
        : parent_edge_(parent_edge), waiting_(child_count), acc_(std::move(own)),
          combine_(combine), result_(result) {}

    void step(Slot, std::span<const Inbound> inbox, Outbox& out) override {
        for (const auto& in : inbox) {
            if (waiting_ == 0) {
                throw ProtocolViolation("convergecast: more reports than children");
            }
            --waiting_;
            if (in.message.size() == 0) continue;
            acc_ = acc_ ? combine_(*acc_, in.message) : in.message;
        }
        if (waiting_ > 0) return;
        if (parent_edge_) {
            out.send(*parent_edge_, acc_.value_or(Message{}));
        } else {
            result_ = acc_;
        }
        done_ = true;
    }

    bool halted() const override { return done_; }

private:
    std::optional<std::size_t> parent_edge_;
    std::size_t waiting_;
    std::optional<Message> acc_;
    Combine combine_;
    std::optional<Message>& result_;
    bool done_ = false;
};

template <class Combine>
std::pair<std::optional<Message>, ExecutionReport> run_convergecast(
    RoundEngine& engine, const ParentMap& tree, const std::vector<std::optional<Message>>& own,
    Combine combine) {
    const Graph& g = engine.graph();
    validate_tree(g, tree);
    auto children = child_edges(g, tree);
    std::optional<Message> result;
    ProgramList programs;
    for (NodeId u = 1; u <= g.node_count(); ++u) {
        std::optional<std::size_t> parent_edge;
        if (tree[u] != kNoNode) parent_edge = g.edge_index(u, tree[u]);
        programs.push_back(std::make_unique<ConvergecastProgram<Combine>>(
            parent_edge, children[u].size(), own[u], combine, result));
    }
    auto report = engine.run(programs, 4 * (g.node_count() + 1) * (g.max_delay() + 1));
    return {result, report};
}

}  // namespace

std::optional<std::uint64_t> BroadcastResult::value(NodeId u) const {
    if (u >= payload.size() || !payload[u] || payload[u]->size() == 0) return std::nullopt;
    return (*payload[u])[0];
}

BroadcastResult flood_broadcast(RoundEngine& engine, NodeId source, std::uint64_t value) {
    const Graph& g = engine.graph();
    BroadcastResult result;
    result.payload.assign(g.node_count() + 1, std::nullopt);
    result.received_in.assign(g.node_count() + 1, 0);
    ProgramList programs;
    for (NodeId u = 1; u <= g.node_count(); ++u) {
        std::optional<std::uint64_t> initial;
        if (u == source) initial = value;
        programs.push_back(std::make_unique<FloodProgram>(engine.view(u), initial, result));
    }
    result.report = engine.run(programs, 4 * (g.node_count() + 1) * (g.max_delay() + 1));
    return result;
}

BroadcastResult tree_broadcast(RoundEngine& engine, const ParentMap& tree, Message payload) {
    const Graph& g = engine.graph();
    validate_tree(g, tree);
    auto children = child_edges(g, tree);
    BroadcastResult result;
    result.payload.assign(g.node_count() + 1, std::nullopt);
    result.received_in.assign(g.node_count() + 1, 0);
    ProgramList programs;
    for (NodeId u = 1; u <= g.node_count(); ++u) {
        programs.push_back(std::make_unique<TreeBroadcastProgram>(
            engine.view(u), tree[u] == kNoNode, children[u], payload, result));
    }
    result.report = engine.run(programs, 4 * (g.node_count() + 1) * (g.max_delay() + 1));
    return result;
}

ConvergecastMinResult convergecast_min(RoundEngine& engine, const ParentMap& tree,
                                       const std::vector<std::optional<std::uint64_t>>& values) {
    const Graph& g = engine.graph();
    if (values.size() != g.node_count() + 1) {
        throw std::invalid_argument("convergecast_min: values must have n + 1 entries");
    }
    std::vector<std::optional<Message>> own(g.node_count() + 1);
    for (NodeId u = 1; u <= g.node_count(); ++u) {
        if (values[u]) own[u] = Message{*values[u], u};
    }
    auto pick = [](const Message& a, const Message& b) {
        if (b[0] < a[0] || (b[0] == a[0] && b[1] < a[1])) return b;
        return a;
    };
    auto [msg, report] = run_convergecast(engine, tree, own, pick);
    ConvergecastMinResult result;
    result.report = report;
    if (msg) {
        result.value = (*msg)[0];
        result.arg = static_cast<NodeId>((*msg)[1]);
    }
    return result;
}

ConvergecastSumResult convergecast_sum(RoundEngine& engine, const ParentMap& tree,
                                       const std::vector<std::uint64_t>& values) {
    const Graph& g = engine.graph();
    if (values.size() != g.node_count() + 1) {
        throw std::invalid_argument("convergecast_sum: values must have n + 1 entries");
    }
    std::vector<std::optional<Message>> own(g.node_count() + 1);
    for (NodeId u = 1; u <= g.node_count(); ++u) own[u] = Message{values[u]};
    auto add = [](const Message& a, const Message& b) { return Message{a[0] + b[0]}; };
    auto [msg, report] = run_convergecast(engine, tree, own, add);
    ConvergecastSumResult result;
    result.report = report;
    if (msg) result.value = (*msg)[0];
    return result;
}

}  // namespace mrct
