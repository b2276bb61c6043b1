#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mrct/graph.hpp"
#include "mrct/mrct.hpp"

namespace mrct {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ModeSelection { deterministic, randomized, both };

struct ExperimentConfig {
    GraphKind graph = GraphKind::random_connected;
    std::size_t n = 16;
    double p = 0.3;
    Delay max_delay = 1;
    /// "all", or "random" (size drawn per trial), or "random:<k>".
    std::string terminals = "all";
    ModeSelection mode = ModeSelection::deterministic;
    double alpha = 1.0;
    std::uint64_t seed = 1;
    std::vector<std::uint64_t> seeds;  ///< explicit seeds override seed + trial index
    std::size_t trials = 1;
    bool exact = false;  ///< compare against the enumerated optimum
    unsigned threads = 1;
    std::string out;

    /// Applies one key=value setting; unknown keys are errors.
    void set(std::string_view key, std::string_view value);
    void validate() const;
    std::uint64_t trial_seed(std::size_t trial) const;
};

/// Parses "key = value" lines; '#' starts a comment.
ExperimentConfig parse_config(std::string_view text);

struct TrialRecord {
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    std::size_t n = 0;
    std::size_t m = 0;
    Cost diameter = 0;
    Cost d_prime = 0;
    std::size_t terminals = 0;
    Mode mode = Mode::deterministic;
    NodeId chosen_root = kNoNode;
    Cost rc_chosen = 0;
    Cost rc_graph = 0;
    std::optional<Cost> rc_exact;
    double ratio = 0;
    double bound = 0;
    bool bound_ok = true;
    std::optional<bool> exact_ok;
    Slot rounds = 0;
    Slot round_budget = 0;
    Slot part1 = 0;
    Slot part2 = 0;
    Slot slot_budget = 0;  ///< |roots| + 2 D'
    std::size_t max_edge_bits = 0;
    std::size_t bandwidth = 0;
    std::size_t s = 0;
    double beta = 0;
    bool fallback = false;
    std::optional<bool> good_node;
    std::vector<NodeId> sample;

    bool ok() const;
};

struct Aggregate {
    std::size_t trials = 0;
    double max_ratio = 0;
    std::size_t violations = 0;
    double failure_fraction = 0;
    double round_constant = 0;  ///< max rounds / (|roots| + D)
    std::size_t max_edge_bits = 0;
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<TrialRecord> trials;

    Aggregate aggregate(std::optional<Mode> mode = std::nullopt) const;
    bool all_ok() const;
};

/// One trial on a given graph and terminal set.
TrialRecord run_trial(const Graph& g, const TerminalSet& terminals, Mode mode, double alpha, std::uint64_t seed,
                      bool exact);

/// "all", "random" (size drawn from the seed), "random:<k>" or a comma list of IDs.
TerminalSet choose_terminals(const Graph& g, std::string_view selection, std::uint64_t seed);

/// Graph and terminal set of one trial, reproducible from the config and seed.
std::pair<Graph, TerminalSet> trial_instance(const ExperimentConfig& config, std::uint64_t seed);

ExperimentReport run_experiment(const ExperimentConfig& config);

nlohmann::json report_json(const ExperimentReport& report);

/// CSV with header n,D,S,mode,ratio,bound,rounds,round_budget,max_edge_bits.
std::string emit_plotdata(const ExperimentReport& report);

struct PlotRow {
    std::size_t n = 0;
    Cost diameter = 0;
    std::size_t terminals = 0;
    Mode mode = Mode::deterministic;
    double ratio = 0;
    double bound = 0;
    Slot rounds = 0;
    Slot round_budget = 0;
    std::size_t max_edge_bits = 0;
};

std::vector<PlotRow> parse_plotdata(std::string_view csv);
Aggregate aggregate_rows(std::span<const PlotRow> rows);

}  // namespace mrct
