#include "mrct/mrct.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>
#include <set>

#include "mrct/oracle.hpp"

namespace mrct {

ApproxParams ApproxParams::with_alpha(double a, std::uint64_t seed) {
    ApproxParams p;
    p.alpha = [a](std::size_t, Cost) { return a; };
    p.seed = seed;
    return p;
}

void ApproxParams::validate() const {
    if (!alpha) throw std::invalid_argument("alpha is not set");
    if (!(c_sample >= 1.0)) throw std::invalid_argument("c_sample must be >= 1");
}

SamplingPlan sampling_plan(std::size_t n, std::size_t terminal_count, Cost diameter_estimate, double alpha) {
    if (!(alpha > 0)) throw std::invalid_argument("alpha must be positive");
    if (terminal_count < 2) throw std::invalid_argument("need at least two terminals");
    double ln_n = std::log(static_cast<double>(n));
    double d = static_cast<double>(std::max<Cost>(1, diameter_estimate));
    SamplingPlan plan;
    plan.beta = std::min(ln_n / d, alpha);
    double head = 2.0 - 2.0 / static_cast<double>(terminal_count);
    // A hair of slack keeps exact quotients like 1.5/0.5 from rounding up.
    plan.gamma = static_cast<std::size_t>(std::ceil(head / plan.beta - 1e-9)) + 1;
    plan.s = static_cast<std::size_t>(std::ceil(static_cast<double>(plan.gamma) * ln_n - 1e-9));
    plan.s = std::max<std::size_t>(plan.s, 2);
    plan.fallback = terminal_count <= plan.s;
    return plan;
}

std::string_view to_string(Mode mode) {
    return mode == Mode::deterministic ? "deterministic" : "randomized";
}

Mode parse_mode(std::string_view name) {
    if (name == "det" || name == "deterministic") return Mode::deterministic;
    if (name == "rand" || name == "randomized") return Mode::randomized;
    throw std::invalid_argument("unknown mode: " + std::string(name));
}

Slot MrctResult::phase_slots(std::string_view name) const {
    Slot total = 0;
    for (const auto& p : phases) {
        if (p.name == name) total += p.report.charged_slots();
    }
    return total;
}

namespace {

class Pipeline {
public:
    Pipeline(const Graph& g, EngineOptions options) : engine_(g, options) {}

    RoundEngine& engine() { return engine_; }

    void log(std::string name, const ExecutionReport& report) { phases_.push_back({std::move(name), report}); }
    void log(const std::vector<PhaseLog>& phases) { phases_.insert(phases_.end(), phases.begin(), phases.end()); }

    void finish(MrctResult& result) {
        result.phases = phases_;
        result.bandwidth = engine_.bandwidth();
        Slot charged = 0;
        for (const auto& p : phases_) {
            charged += p.report.charged_slots();
            result.max_edge_bits = std::max(result.max_edge_bits, p.report.max_edge_bits);
            result.messages_total += p.report.messages_total;
        }
        result.rounds_used = charged + 1;
    }

private:
    RoundEngine engine_;
    std::vector<PhaseLog> phases_;
};

// Part 1, Part 2, argmin and announcement over a fixed root set.
void evaluate_roots(Pipeline& pipe, const LeaderInfo& leader, const TerminalSet& roots,
                    const TerminalSet& terminals, MrctResult& result) {
    auto& engine = pipe.engine();
    const Graph& g = engine.graph();
    result.trees = build_trees(engine, roots, leader.d_prime);
    pipe.log("part1", result.trees.report);
    result.costs = compute_all_rc(engine, result.trees, terminals);
    pipe.log("part2", result.costs.report);

    std::vector<std::optional<std::uint64_t>> values(g.node_count() + 1);
    for (std::size_t k = 0; k < result.costs.roots.size(); ++k) {
        values[result.costs.roots[k]] = static_cast<std::uint64_t>(result.costs.rc[k]);
    }
    auto best = convergecast_min(engine, leader.tree, values);
    pipe.log("argmin", best.report);
    result.chosen_root = best.arg;
    result.rc_chosen = static_cast<Cost>(best.value.value());

    auto ann = announce_tree(engine, leader, result.trees, result.chosen_root);
    pipe.log("announce", ann.report);
    result.tree = std::move(ann.tree);
    result.sample = result.trees.roots;
}

// Each node forwards its items toward the leader in increasing (rank, id)
// order, at most k of them, then signals completion with an empty message.
class SmallestUpcast : public NodeProgram {
public:
    using Item = std::pair<std::uint64_t, NodeId>;

    SmallestUpcast(std::optional<std::size_t> parent_edge, std::vector<std::size_t> children,
                   std::optional<Item> own, std::size_t k, std::vector<Item>& collected)
        : parent_edge_(parent_edge), k_(k), collected_(collected) {
        if (own) items_.insert(*own);
        for (auto e : children) open_[e] = std::nullopt;
    }

    void step(Slot, std::span<const Inbound> inbox, Outbox& out) override {
        for (const auto& in : inbox) {
            auto it = open_.find(in.edge);
            if (it == open_.end()) throw ProtocolViolation("upcast item from a closed or non-child edge");
            if (in.message.size() == 0) {
                open_.erase(it);
                continue;
            }
            Item item{in.message[0], static_cast<NodeId>(in.message[1])};
            items_.insert(item);
            it->second = item;
        }
        if (sent_ < k_ && !items_.empty() && safe(*items_.begin())) {
            Item next = *items_.begin();
            items_.erase(items_.begin());
            ++sent_;
            if (parent_edge_) {
                out.send(*parent_edge_, Message{next.first, next.second});
            } else {
                collected_.push_back(next);
            }
            return;
        }
        bool exhausted = open_.empty() && items_.empty();
        if (sent_ == k_ || exhausted) {
            if (parent_edge_) out.send(*parent_edge_, Message{});
            done_ = true;
        }
    }

    bool halted() const override { return done_; }

private:
    bool safe(const Item& candidate) const {
        for (const auto& [edge, last] : open_) {
            if (!last || *last < candidate) return false;
        }
        return true;
    }

    std::optional<std::size_t> parent_edge_;
    std::size_t k_;
    std::vector<Item>& collected_;
    std::set<Item> items_;
    std::map<std::size_t, std::optional<Item>> open_;
    std::size_t sent_ = 0;
    bool done_ = false;
};

}  // namespace

SampleOutcome sample_terminals(RoundEngine& engine, const TerminalSet& terminals, const LeaderInfo& leader,
                               std::size_t s, const ApproxParams& params) {
    params.validate();
    const Graph& g = engine.graph();
    const std::size_t n = g.node_count();
    const std::uint64_t rank_range = static_cast<std::uint64_t>(n) * n * n;
    const double p = std::min(1.0, params.c_sample * static_cast<double>(s) /
                                       static_cast<double>(terminals.size()));
    auto children = child_edges(g, leader.tree);

    SampleOutcome outcome;
    for (std::size_t attempt = 1; attempt <= kMaxSamplingAttempts; ++attempt) {
        outcome.attempts = attempt;
        std::vector<std::optional<SmallestUpcast::Item>> own(n + 1);
        for (NodeId u : terminals.members()) {
            std::seed_seq seq{static_cast<std::uint32_t>(params.seed), static_cast<std::uint32_t>(params.seed >> 32),
                              static_cast<std::uint32_t>(attempt), static_cast<std::uint32_t>(u)};
            std::mt19937_64 rng(seq);
            if (std::bernoulli_distribution(p)(rng)) {
                own[u] = SmallestUpcast::Item{std::uniform_int_distribution<std::uint64_t>(0, rank_range - 1)(rng), u};
            }
        }
        std::vector<SmallestUpcast::Item> collected;
        ProgramList programs;
        for (NodeId u = 1; u <= n; ++u) {
            std::optional<std::size_t> parent_edge;
            if (leader.tree[u] != kNoNode) parent_edge = g.edge_index(u, leader.tree[u]);
            programs.push_back(std::make_unique<SmallestUpcast>(parent_edge, children[u], own[u], s, collected));
        }
        Slot limit = 4 * (static_cast<Slot>(s) + n * (g.max_delay() + 1));
        auto report = engine.run(programs, limit);
        if (!report.halted_all) throw ProtocolViolation("sample upcast did not finish");
        outcome.phases.push_back({"sample_upcast", report});

        Message verdict;
        if (collected.size() >= s) verdict = Message{collected[s - 1].first, collected[s - 1].second};
        auto bc = announce(engine, leader, verdict);
        outcome.phases.push_back({"sample_broadcast", bc.report});
        if (verdict.size() == 0) continue;

        SmallestUpcast::Item threshold{verdict[0], static_cast<NodeId>(verdict[1])};
        for (NodeId u = 1; u <= n; ++u) {
            const auto& heard = bc.payload[u].value();
            SmallestUpcast::Item local{heard[0], static_cast<NodeId>(heard[1])};
            if (own[u] && *own[u] <= local) outcome.sample.push_back(u);
        }
        if (threshold != collected[s - 1] || outcome.sample.size() != s) {
            throw ProtocolViolation("sample threshold disagrees with the collected ranks");
        }
        return outcome;
    }
    throw SamplingFailure("fewer than " + std::to_string(s) + " terminals volunteered in " +
                          std::to_string(kMaxSamplingAttempts) + " attempts");
}

Announcement announce_tree(RoundEngine& engine, const LeaderInfo& leader, const SpTrees& trees,
                           NodeId chosen_root) {
    const Graph& g = engine.graph();
    auto bc = tree_broadcast(engine, leader.tree, chosen_root);
    Announcement out;
    out.report = bc.report;
    out.tree.assign(g.node_count() + 1, kNoNode);
    for (NodeId u = 1; u <= g.node_count(); ++u) {
        auto root = static_cast<NodeId>(bc.value(u).value());
        auto k = trees.root_index(root);
        if (!k) throw CorrectnessViolation("announced root " + std::to_string(root) + " has no tree");
        out.tree[u] = trees.parent(g, u, *k);
    }
    validate_tree(g, out.tree);
    return out;
}

MrctResult run_deterministic(const Graph& g, const TerminalSet& terminals, EngineOptions options) {
    Pipeline pipe(g, options);
    MrctResult result;
    result.mode = Mode::deterministic;
    auto dp = compute_dprime(pipe.engine(), terminals);
    pipe.log("echo", dp.leader.report);
    pipe.log("params", dp.broadcast_report);
    result.d_prime = dp.value();
    evaluate_roots(pipe, dp.leader, terminals, terminals, result);
    pipe.finish(result);
    return result;
}

MrctResult run_randomized(const Graph& g, const TerminalSet& terminals, const ApproxParams& params,
                          EngineOptions options) {
    params.validate();
    Pipeline pipe(g, options);
    MrctResult result;
    result.mode = Mode::randomized;

    auto leader = leader_echo(pipe.engine(), terminals);
    pipe.log("echo", leader.report);
    result.d_prime = leader.d_prime;
    double alpha = params.alpha(leader.node_count, 2 * leader.d_prime);
    auto plan = sampling_plan(leader.node_count, leader.terminal_count, 2 * leader.d_prime, alpha);
    result.plan = plan;
    result.fallback = plan.fallback;
    auto bc = announce(pipe.engine(), leader,
                       Message{static_cast<std::uint64_t>(leader.d_prime), leader.terminal_count, plan.s,
                               plan.fallback ? 1u : 0u});
    pipe.log("params", bc.report);

    if (plan.fallback) {
        evaluate_roots(pipe, leader, terminals, terminals, result);
    } else {
        auto sampled = sample_terminals(pipe.engine(), terminals, leader, plan.s, params);
        pipe.log(sampled.phases);
        result.attempts = sampled.attempts;
        TerminalSet roots(g, sampled.sample);
        evaluate_roots(pipe, leader, roots, terminals, result);
    }
    pipe.finish(result);
    return result;
}

double approximation_bound(const MrctResult& result, std::size_t terminal_count) {
    double bound = 2.0 - 2.0 / static_cast<double>(terminal_count);
    if (result.mode == Mode::randomized && result.plan && !result.plan->fallback) bound += result.plan->beta;
    return bound;
}

nlohmann::json result_json(const MrctResult& result, const Graph& g, const TerminalSet& terminals) {
    Cost rc_graph = oracle::rc_exact(g, terminals);
    nlohmann::json out;
    out["mode"] = to_string(result.mode);
    out["chosen_root"] = result.chosen_root;
    out["rc_chosen"] = result.rc_chosen;
    out["rc_graph_oracle"] = rc_graph;
    out["ratio"] = static_cast<double>(result.rc_chosen) / static_cast<double>(rc_graph);
    out["bound"] = approximation_bound(result, terminals.size());
    out["rounds_used"] = result.rounds_used;
    out["max_edge_bits"] = result.max_edge_bits;
    out["sample"] = result.sample;
    return out;
}

}  // namespace mrct
