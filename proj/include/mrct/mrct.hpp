#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "mrct/congest.hpp"
#include "mrct/routing_cost.hpp"
#include "mrct/sptrees.hpp"

namespace mrct {

class SamplingFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ApproxParams {
    /// alpha(n, D) > 0, evaluated with the leader's diameter estimate 2 D'.
    std::function<double(std::size_t, Cost)> alpha = [](std::size_t, Cost) { return 1.0; };
    double c_sample = 2.0;
    std::uint64_t seed = 1;

    static ApproxParams with_alpha(double a, std::uint64_t seed = 1);
    void validate() const;
};

struct SamplingPlan {
    double beta = 0;
    std::size_t gamma = 0;
    std::size_t s = 0;
    bool fallback = false;  ///< |S| <= s: every terminal is used
};

SamplingPlan sampling_plan(std::size_t n, std::size_t terminal_count, Cost diameter_estimate, double alpha);

inline constexpr std::size_t kMaxSamplingAttempts = 10;

enum class Mode { deterministic, randomized };
std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view name);

struct PhaseLog {
    std::string name;
    ExecutionReport report;
};

struct MrctResult {
    Mode mode = Mode::deterministic;
    NodeId chosen_root = kNoNode;
    Cost rc_chosen = 0;
    ParentMap tree;  ///< output parent of every node; kNoNode at the chosen root
    Slot rounds_used = 0;
    std::size_t max_edge_bits = 0;
    std::uint64_t messages_total = 0;
    std::size_t bandwidth = 0;
    std::vector<NodeId> sample;  ///< roots actually evaluated
    Cost d_prime = 0;
    std::optional<SamplingPlan> plan;
    bool fallback = false;
    std::size_t attempts = 0;
    std::vector<PhaseLog> phases;
    SpTrees trees;
    RoutingCosts costs;

    Slot phase_slots(std::string_view name) const;
};

MrctResult run_deterministic(const Graph& g, const TerminalSet& terminals, EngineOptions options = {});
MrctResult run_randomized(const Graph& g, const TerminalSet& terminals, const ApproxParams& params,
                          EngineOptions options = {});

struct SampleOutcome {
    std::vector<NodeId> sample;
    std::size_t attempts = 0;
    std::vector<PhaseLog> phases;
};

/// Coin flips with probability min(1, c s / |S|), ranks drawn in [0, n^3),
/// and the s smallest (rank, id) pairs piped up the leader tree.
SampleOutcome sample_terminals(RoundEngine& engine, const TerminalSet& terminals, const LeaderInfo& leader,
                               std::size_t s, const ApproxParams& params);

struct Announcement {
    ParentMap tree;
    ExecutionReport report;
};

Announcement announce_tree(RoundEngine& engine, const LeaderInfo& leader, const SpTrees& trees,
                           NodeId chosen_root);

/// Approximation factor the result is held to: 2 - 2/|S|, plus beta when sampled.
double approximation_bound(const MrctResult& result, std::size_t terminal_count);

/// {mode, chosen_root, rc_chosen, rc_graph_oracle, ratio, bound, rounds_used, max_edge_bits, sample}
nlohmann::json result_json(const MrctResult& result, const Graph& g, const TerminalSet& terminals);

}  // namespace mrct
