#include "mrct/sptrees.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "detail/reverse_wave.hpp"

namespace mrct {

namespace {

class EchoProgram : public NodeProgram {
public:
    EchoProgram(LocalView view, bool is_leader, bool in_s, LeaderInfo& info)
        : view_(view), is_leader_(is_leader), in_s_(in_s), info_(info) {}

    void step(Slot slot, std::span<const Inbound> inbox, Outbox& out) override {
        std::optional<std::size_t> adopted_from;
        if (is_leader_ && slot == 1) {
            adopt(0, std::nullopt, out);
        } else if (!dist_) {
            for (const auto& in : inbox) {
                if (in.message.size() == 1) {
                    adopt(static_cast<Cost>(in.message[0]), in.edge, out);
                    adopted_from = in.edge;
                    break;
                }
            }
        }
        for (const auto& in : inbox) {
            if (adopted_from && in.edge == *adopted_from) continue;
            if (!dist_) throw ProtocolViolation("echo reached a node outside the wave");
            if (in.message.size() == 3) {
                max_dist_ = std::max<Cost>(max_dist_, static_cast<Cost>(in.message[0]));
                count_ += in.message[1];
                s_count_ += in.message[2];
            } else if (in.message.size() != 1) {
                throw ProtocolViolation("malformed echo message");
            }
            --remaining_;
        }
        if (!dist_ || remaining_ > 0) return;
        if (is_leader_) {
            info_.d_prime = max_dist_;
            info_.node_count = count_;
            info_.terminal_count = s_count_;
        } else {
            out.send(*parent_edge_, Message{static_cast<std::uint64_t>(max_dist_), count_, s_count_});
        }
        done_ = true;
    }

    bool halted() const override { return done_; }

private:
    void adopt(Cost dist, std::optional<std::size_t> parent_edge, Outbox& out) {
        dist_ = dist;
        parent_edge_ = parent_edge;
        max_dist_ = dist;
        count_ = 1;
        s_count_ = in_s_ ? 1 : 0;
        remaining_ = view_.degree() - (parent_edge ? 1 : 0);
        info_.dist[view_.id] = dist;
        info_.tree[view_.id] = parent_edge ? view_.neighbors[*parent_edge].id : kNoNode;
        for (std::size_t e = 0; e < view_.degree(); ++e) {
            if (parent_edge && e == *parent_edge) continue;
            out.send(e, Message{static_cast<std::uint64_t>(dist + view_.delay(e))});
        }
    }

    LocalView view_;
    bool is_leader_;
    bool in_s_;
    LeaderInfo& info_;
    std::optional<Cost> dist_;
    std::optional<std::size_t> parent_edge_;
    Cost max_dist_ = 0;
    std::uint64_t count_ = 0;
    std::uint64_t s_count_ = 0;
    std::size_t remaining_ = 0;
    bool done_ = false;
};

class TreeBuildProgram : public NodeProgram {
public:
    TreeBuildProgram(LocalView view, bool is_root, Slot budget, std::map<NodeId, RootEntry>& table)
        : view_(view), budget_(budget), table_(table), pending_(view.degree()) {
        if (is_root) {
            table_[view.id] = RootEntry{0, 0, std::nullopt};
            for (auto& p : pending_) p.insert({0, view.id});
        }
    }

    void step(Slot slot, std::span<const Inbound> inbox, Outbox& out) override {
        for (const auto& in : inbox) {
            auto root = static_cast<NodeId>(in.message[0]);
            auto d = static_cast<Cost>(in.message[1]);
            auto& e = table_[root];
            if (d >= e.omega) continue;
            if (e.omega != kInfiniteCost) {
                for (auto& p : pending_) p.erase({e.omega, root});
            }
            e.omega = d;
            e.tau = slot - 1;
            e.parent_edge = in.edge;
            for (std::size_t j = 0; j < pending_.size(); ++j) {
                if (j != in.edge) pending_[j].insert({d, root});
            }
        }
        if (slot > budget_) {
            done_ = true;
            return;
        }
        for (std::size_t j = 0; j < pending_.size(); ++j) {
            if (pending_[j].empty()) continue;
            Delay w = view_.delay(j);
            if (slot + w - 1 > budget_) continue;
            auto [d, root] = *pending_[j].begin();
            pending_[j].erase(pending_[j].begin());
            out.send(j, Message{root, static_cast<std::uint64_t>(d + w)});
        }
    }

    bool halted() const override { return done_; }

private:
    LocalView view_;
    Slot budget_;
    std::map<NodeId, RootEntry>& table_;
    std::vector<std::set<std::pair<Cost, NodeId>>> pending_;
    bool done_ = false;
};

}  // namespace

LeaderInfo leader_echo(RoundEngine& engine, const TerminalSet& terminals) {
    const Graph& g = engine.graph();
    LeaderInfo info;
    info.tree.assign(g.node_count() + 1, kNoNode);
    info.dist.assign(g.node_count() + 1, kInfiniteCost);
    ProgramList programs;
    for (NodeId u = 1; u <= g.node_count(); ++u) {
        programs.push_back(
            std::make_unique<EchoProgram>(engine.view(u), u == info.leader, terminals.contains(u), info));
    }
    Slot limit = 2 * (static_cast<Slot>(g.node_count()) * g.max_delay() + 2);
    info.report = engine.run(programs, limit);
    if (!info.report.halted_all) throw CorrectnessViolation("wave and echo did not terminate");
    validate_tree(g, info.tree);
    return info;
}

BroadcastResult announce(RoundEngine& engine, const LeaderInfo& leader, Message fields) {
    return tree_broadcast(engine, leader.tree, std::move(fields));
}

DPrime compute_dprime(RoundEngine& engine, const TerminalSet& terminals) {
    DPrime result;
    result.leader = leader_echo(engine, terminals);
    auto bc = announce(engine, result.leader,
                       Message{static_cast<std::uint64_t>(result.leader.d_prime), result.leader.terminal_count});
    result.broadcast_report = bc.report;
    result.at_node.assign(engine.graph().node_count() + 1, 0);
    for (NodeId u = 1; u <= engine.graph().node_count(); ++u) {
        result.at_node[u] = static_cast<Cost>(bc.value(u).value());
    }
    return result;
}

std::optional<std::size_t> SpTrees::root_index(NodeId root) const {
    auto it = std::lower_bound(roots.begin(), roots.end(), root);
    if (it == roots.end() || *it != root) return std::nullopt;
    return static_cast<std::size_t>(it - roots.begin());
}

NodeId SpTrees::parent(const Graph& g, NodeId u, std::size_t k) const {
    const auto& e = entry(u, k);
    if (!e.parent_edge) return kNoNode;
    return g.neighbors(u)[*e.parent_edge].id;
}

ParentMap SpTrees::tree_of(const Graph& g, std::size_t k) const {
    ParentMap tree(g.node_count() + 1, kNoNode);
    for (NodeId u = 1; u <= g.node_count(); ++u) tree[u] = parent(g, u, k);
    return tree;
}

Slot SpTrees::max_tau() const {
    Slot best = 0;
    for (const auto& t : tables) {
        for (const auto& e : t.entries) best = std::max(best, e.tau);
    }
    return best;
}

SpTrees build_trees(RoundEngine& engine, const TerminalSet& roots, Cost d_prime) {
    const Graph& g = engine.graph();
    SpTrees trees;
    trees.roots.assign(roots.members().begin(), roots.members().end());
    trees.d_prime = d_prime;
    trees.budget = roots.size() + 2 * static_cast<Slot>(d_prime);

    std::vector<std::map<NodeId, RootEntry>> local(g.node_count() + 1);
    ProgramList programs;
    for (NodeId u = 1; u <= g.node_count(); ++u) {
        programs.push_back(
            std::make_unique<TreeBuildProgram>(engine.view(u), roots.contains(u), trees.budget, local[u]));
    }
    trees.report = engine.run(programs, trees.budget + 1);

    trees.tables.resize(g.node_count() + 1);
    for (NodeId u = 1; u <= g.node_count(); ++u) {
        auto& entries = trees.tables[u].entries;
        entries.reserve(trees.roots.size());
        for (NodeId r : trees.roots) {
            auto it = local[u].find(r);
            if (it == local[u].end() || it->second.omega == kInfiniteCost) {
                throw CorrectnessViolation("node " + std::to_string(u) + " has no distance to root " +
                                           std::to_string(r) + " after " + std::to_string(trees.budget) +
                                           " slots");
            }
            entries.push_back(it->second);
        }
    }
    return trees;
}

nlohmann::json tree_tables_json(const SpTrees& trees) {
    nlohmann::json out = nlohmann::json::object();
    for (std::size_t u = 1; u < trees.tables.size(); ++u) {
        nlohmann::json node = nlohmann::json::object();
        for (std::size_t k = 0; k < trees.roots.size(); ++k) {
            const auto& e = trees.tables[u].entries[k];
            nlohmann::json parent = nullptr;
            if (e.parent_edge) parent = *e.parent_edge;
            node[std::to_string(trees.roots[k])] = {{"omega", e.omega}, {"tau", e.tau}, {"parent_edge", parent}};
        }
        out[std::to_string(u)] = std::move(node);
    }
    return out;
}

Ssrc compute_ssrc(RoundEngine& engine, const SpTrees& trees, const TerminalSet& terminals) {
    auto initial = [&](NodeId u) {
        std::vector<detail::WaveFields> acc(trees.roots.size());
        for (std::size_t k = 0; k < trees.roots.size(); ++k) {
            auto own = terminals.contains(u) ? trees.entry(u, k).omega : 0;
            acc[k] = {static_cast<std::uint64_t>(own)};
        }
        return acc;
    };
    auto add = [](detail::WaveFields& acc, const Message& report, Delay) { acc[0] += report[1]; };
    auto [fields, report] = detail::run_reverse_wave(engine, trees, initial, add);
    Ssrc result;
    result.report = report;
    for (std::size_t k = 0; k < trees.roots.size(); ++k) {
        result.by_root.push_back(static_cast<Cost>(fields[trees.roots[k]][k][0]));
    }
    return result;
}

std::optional<Cost> local_ssrc(const SpTrees& trees, const TerminalSet& terminals, std::size_t k) {
    Cost sum = 0;
    NodeId v = trees.roots.at(k);
    for (NodeId u : terminals.members()) {
        auto j = trees.root_index(u);
        if (!j) return std::nullopt;
        sum += trees.entry(v, *j).omega;
    }
    return sum;
}

}  // namespace mrct
