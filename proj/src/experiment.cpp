#include "mrct/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <thread>

#include "mrct/oracle.hpp"

namespace mrct {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

template <class T>
T parse_number(std::string_view key, std::string_view value) {
    T out{};
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw ConfigError("bad value for " + std::string(key) + ": '" + std::string(value) + "'");
    }
    return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
    if (value == "1" || value == "true" || value == "yes") return true;
    if (value == "0" || value == "false" || value == "no") return false;
    throw ConfigError("bad value for " + std::string(key) + ": '" + std::string(value) + "'");
}

std::string_view mode_name(Mode m) { return m == Mode::deterministic ? "det" : "rand"; }

// Integer form of rc <= (2 - 2/|S|) * rc_graph.
bool within_deterministic_bound(Cost rc, Cost rc_graph, std::size_t s) {
    auto k = static_cast<__int128>(s);
    return k * rc <= (2 * k - 2) * static_cast<__int128>(rc_graph);
}

}  // namespace

void ExperimentConfig::set(std::string_view key, std::string_view value) {
    key = trim(key);
    value = trim(value);
    try {
        if (key == "graph") {
            graph = parse_graph_kind(value);
        } else if (key == "n") {
            n = parse_number<std::size_t>(key, value);
        } else if (key == "p") {
            p = parse_number<double>(key, value);
        } else if (key == "max_delay" || key == "max-delay") {
            max_delay = parse_number<Delay>(key, value);
        } else if (key == "terminals") {
            terminals = std::string(value);
        } else if (key == "mode") {
            if (value == "both") {
                mode = ModeSelection::both;
            } else {
                mode = parse_mode(value) == Mode::deterministic ? ModeSelection::deterministic
                                                                 : ModeSelection::randomized;
            }
        } else if (key == "alpha") {
            alpha = parse_number<double>(key, value);
        } else if (key == "seed") {
            seed = parse_number<std::uint64_t>(key, value);
        } else if (key == "seeds") {
            seeds.clear();
            std::size_t pos = 0;
            while (pos <= value.size()) {
                auto comma = value.find(',', pos);
                auto item = trim(value.substr(pos, comma == std::string_view::npos ? value.npos : comma - pos));
                if (!item.empty()) seeds.push_back(parse_number<std::uint64_t>(key, item));
                if (comma == std::string_view::npos) break;
                pos = comma + 1;
            }
        } else if (key == "trials") {
            trials = parse_number<std::size_t>(key, value);
        } else if (key == "exact") {
            exact = parse_bool(key, value);
        } else if (key == "threads") {
            threads = parse_number<unsigned>(key, value);
        } else if (key == "out") {
            out = std::string(value);
        } else {
            throw ConfigError("unknown key: " + std::string(key));
        }
    } catch (const GraphError& e) {
        throw ConfigError(e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

void ExperimentConfig::validate() const {
    if (n < 2) throw ConfigError("n must be at least 2");
    if (!(p > 0 && p <= 1)) throw ConfigError("p must be in (0, 1]");
    if (max_delay < 1) throw ConfigError("max_delay must be at least 1");
    if (!(alpha > 0)) throw ConfigError("alpha must be positive");
    if (trials < 1 && seeds.empty()) throw ConfigError("trials must be at least 1");
    if (terminals.starts_with("random:")) {
        auto k = parse_number<std::size_t>("terminals", std::string_view(terminals).substr(7));
        if (k < 2 || k > n) throw ConfigError("terminal count must be within [2, n]");
    }
    if (exact && n > oracle::kExactMaxNodes && graph != GraphKind::path && graph != GraphKind::star &&
        graph != GraphKind::random_tree && graph != GraphKind::cycle) {
        throw ConfigError("exact comparison requested beyond the enumeration budget (n = " +
                          std::to_string(n) + ")");
    }
}

std::uint64_t ExperimentConfig::trial_seed(std::size_t trial) const {
    return seeds.empty() ? seed + trial : seeds.at(trial);
}

ExperimentConfig parse_config(std::string_view text) {
    ExperimentConfig config;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        auto line = text.substr(pos, end == std::string_view::npos ? text.npos : end - pos);
        pos = end == std::string_view::npos ? text.size() : end + 1;
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        }
        try {
            config.set(line.substr(0, eq), line.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return config;
}

bool TrialRecord::ok() const {
    bool structural = exact_ok.value_or(true) && rounds <= round_budget && max_edge_bits <= bandwidth &&
                      part1 == slot_budget && part2 == slot_budget;
    // A sampled run may miss its ratio bound with small probability; that is
    // counted in the aggregate, not treated as a broken invariant.
    bool statistical = mode == Mode::randomized && !fallback;
    return structural && (bound_ok || statistical);
}

TerminalSet choose_terminals(const Graph& g, std::string_view selection, std::uint64_t seed) {
    selection = trim(selection);
    if (selection == "all") return TerminalSet::all(g);
    if (selection.starts_with("random")) {
        std::mt19937_64 rng(seed ^ 0x5eedULL);
        std::size_t k;
        if (selection == "random") {
            k = std::uniform_int_distribution<std::size_t>(2, g.node_count())(rng);
        } else if (selection.starts_with("random:")) {
            k = parse_number<std::size_t>("terminals", selection.substr(7));
        } else {
            throw ConfigError("bad terminal selection: " + std::string(selection));
        }
        if (k < 2 || k > g.node_count()) throw ConfigError("terminal count must be within [2, n]");
        std::vector<NodeId> ids(g.node_count());
        for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<NodeId>(i + 1);
        std::shuffle(ids.begin(), ids.end(), rng);
        ids.resize(k);
        return TerminalSet(g, ids);
    }
    std::vector<NodeId> ids;
    std::size_t pos = 0;
    while (pos <= selection.size()) {
        auto comma = selection.find(',', pos);
        auto item = trim(selection.substr(pos, comma == std::string_view::npos ? selection.npos : comma - pos));
        ids.push_back(parse_number<NodeId>("terminals", item));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return TerminalSet(g, ids);
}

std::pair<Graph, TerminalSet> trial_instance(const ExperimentConfig& config, std::uint64_t seed) {
    GenerateOptions opts;
    opts.p = config.p;
    opts.seed = seed;
    opts.max_delay = config.max_delay;
    Graph g = generate(config.graph, config.n, opts);
    TerminalSet s = choose_terminals(g, config.terminals, seed);
    return {std::move(g), std::move(s)};
}

TrialRecord run_trial(const Graph& g, const TerminalSet& terminals, Mode mode, double alpha, std::uint64_t seed,
                      bool exact) {
    auto dist = oracle::apsp(g);
    MrctResult result = mode == Mode::deterministic
                            ? run_deterministic(g, terminals)
                            : run_randomized(g, terminals, ApproxParams::with_alpha(alpha, seed));
    validate_tree(g, result.tree);

    TrialRecord t;
    t.seed = seed;
    t.n = g.node_count();
    t.m = g.edge_count();
    t.diameter = weighted_diameter(g);
    t.d_prime = result.d_prime;
    t.terminals = terminals.size();
    t.mode = mode;
    t.chosen_root = result.chosen_root;
    t.rc_chosen = result.rc_chosen;
    t.rc_graph = oracle::rc_exact(dist, terminals.members());
    t.ratio = static_cast<double>(t.rc_chosen) / static_cast<double>(t.rc_graph);
    t.bound = approximation_bound(result, terminals.size());
    if (oracle::rc_exact(g, result.tree, terminals) != result.rc_chosen) t.bound_ok = false;
    if (mode == Mode::deterministic || result.fallback) {
        t.bound_ok = t.bound_ok && within_deterministic_bound(t.rc_chosen, t.rc_graph, t.terminals);
    } else {
        t.bound_ok = t.bound_ok && static_cast<double>(t.rc_chosen) <= t.bound * static_cast<double>(t.rc_graph);
    }
    if (exact) {
        auto best = oracle::mrct_exact(g, terminals);
        t.rc_exact = best.cost;
        if (mode == Mode::deterministic || result.fallback) {
            t.exact_ok = within_deterministic_bound(t.rc_chosen, best.cost, t.terminals);
        }
    }
    t.rounds = result.rounds_used;
    t.part1 = result.phase_slots("part1");
    t.part2 = result.phase_slots("part2");
    t.slot_budget = result.trees.budget;
    t.max_edge_bits = result.max_edge_bits;
    t.bandwidth = result.bandwidth;
    t.sample = result.sample;
    t.fallback = result.fallback;
    Slot roots = terminals.size();
    if (result.plan) {
        t.s = result.plan->s;
        t.beta = result.plan->beta;
        if (!result.fallback) roots = t.s;
    }
    auto D = static_cast<Slot>(t.diameter);
    t.round_budget = 4 * (roots + D) + 6 * D;

    if (mode == Mode::randomized && result.plan && !result.fallback) {
        std::vector<Cost> ssrc;
        for (NodeId u : terminals.members()) ssrc.push_back(oracle::ssrc_exact(dist, terminals.members(), u));
        std::vector<Cost> sorted = ssrc;
        std::sort(sorted.begin(), sorted.end());
        std::size_t k = std::max<std::size_t>(1, terminals.size() / result.plan->gamma);
        Cost threshold = sorted[k - 1];
        bool good = false;
        for (NodeId v : result.sample) {
            if (oracle::ssrc_exact(dist, terminals.members(), v) <= threshold) good = true;
        }
        t.good_node = good;
    }
    return t;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
    config.validate();
    std::vector<Mode> modes;
    if (config.mode != ModeSelection::randomized) modes.push_back(Mode::deterministic);
    if (config.mode != ModeSelection::deterministic) modes.push_back(Mode::randomized);
    std::size_t count = config.seeds.empty() ? config.trials : config.seeds.size();

    ExperimentReport report;
    report.config = config;
    report.trials.resize(count * modes.size());
    auto work = [&](std::size_t index) {
        std::size_t trial = index / modes.size();
        Mode mode = modes[index % modes.size()];
        auto seed = config.trial_seed(trial);
        auto [g, s] = trial_instance(config, seed);
        auto record = run_trial(g, s, mode, config.alpha, seed, config.exact);
        record.trial = trial;
        report.trials[index] = std::move(record);
    };
    unsigned workers = std::max(1u, std::min<unsigned>(config.threads, static_cast<unsigned>(report.trials.size())));
    if (workers == 1) {
        for (std::size_t i = 0; i < report.trials.size(); ++i) work(i);
    } else {
        std::vector<std::exception_ptr> errors(workers);
        {
            std::vector<std::jthread> pool;
            for (unsigned w = 0; w < workers; ++w) {
                pool.emplace_back([&, w] {
                    try {
                        for (std::size_t i = w; i < report.trials.size(); i += workers) work(i);
                    } catch (...) {
                        errors[w] = std::current_exception();
                    }
                });
            }
        }
        for (auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }
    return report;
}

Aggregate ExperimentReport::aggregate(std::optional<Mode> mode) const {
    Aggregate a;
    for (const auto& t : trials) {
        if (mode && t.mode != *mode) continue;
        ++a.trials;
        a.max_ratio = std::max(a.max_ratio, t.ratio);
        if (!t.bound_ok) ++a.violations;
        Slot roots = (t.round_budget - 10 * static_cast<Slot>(t.diameter)) / 4;
        a.round_constant = std::max(a.round_constant, static_cast<double>(t.rounds) /
                                                          static_cast<double>(roots + t.diameter));
        a.max_edge_bits = std::max(a.max_edge_bits, t.max_edge_bits);
    }
    if (a.trials) a.failure_fraction = static_cast<double>(a.violations) / static_cast<double>(a.trials);
    return a;
}

bool ExperimentReport::all_ok() const {
    return std::all_of(trials.begin(), trials.end(), [](const TrialRecord& t) { return t.ok(); });
}

namespace {

nlohmann::json aggregate_json(const Aggregate& a) {
    return {{"trials", a.trials},
            {"max_ratio", a.max_ratio},
            {"violations", a.violations},
            {"failure_fraction", a.failure_fraction},
            {"round_constant", a.round_constant},
            {"max_edge_bits", a.max_edge_bits}};
}

}  // namespace

nlohmann::json report_json(const ExperimentReport& report) {
    const auto& c = report.config;
    nlohmann::json out;
    out["config"] = {{"graph", to_string(c.graph)},
                     {"n", c.n},
                     {"p", c.p},
                     {"max_delay", c.max_delay},
                     {"terminals", c.terminals},
                     {"alpha", c.alpha},
                     {"exact", c.exact}};
    nlohmann::json trials = nlohmann::json::array();
    for (const auto& t : report.trials) {
        nlohmann::json j = {{"trial", t.trial},
                            {"seed", t.seed},
                            {"n", t.n},
                            {"m", t.m},
                            {"D", t.diameter},
                            {"D_prime", t.d_prime},
                            {"S", t.terminals},
                            {"mode", mode_name(t.mode)},
                            {"chosen_root", t.chosen_root},
                            {"rc_chosen", t.rc_chosen},
                            {"rc_graph_oracle", t.rc_graph},
                            {"ratio", t.ratio},
                            {"bound", t.bound},
                            {"bound_ok", t.bound_ok},
                            {"rounds_used", t.rounds},
                            {"round_budget", t.round_budget},
                            {"part1_slots", t.part1},
                            {"part2_slots", t.part2},
                            {"slot_budget", t.slot_budget},
                            {"max_edge_bits", t.max_edge_bits},
                            {"bandwidth", t.bandwidth},
                            {"sample", t.sample}};
        if (t.rc_exact) j["rc_exact"] = *t.rc_exact;
        if (t.exact_ok) j["exact_ok"] = *t.exact_ok;
        if (t.mode == Mode::randomized) {
            j["s"] = t.s;
            j["beta"] = t.beta;
            j["fallback"] = t.fallback;
            if (t.good_node) j["good_node"] = *t.good_node;
        }
        trials.push_back(std::move(j));
    }
    out["trials"] = std::move(trials);
    out["aggregate"] = aggregate_json(report.aggregate());
    out["aggregate_det"] = aggregate_json(report.aggregate(Mode::deterministic));
    out["aggregate_rand"] = aggregate_json(report.aggregate(Mode::randomized));
    out["ok"] = report.all_ok();
    return out;
}

std::string emit_plotdata(const ExperimentReport& report) {
    std::ostringstream out;
    out << "n,D,S,mode,ratio,bound,rounds,round_budget,max_edge_bits\n";
    char buf[64];
    for (const auto& t : report.trials) {
        out << t.n << ',' << t.diameter << ',' << t.terminals << ',' << mode_name(t.mode) << ',';
        std::snprintf(buf, sizeof buf, "%.17g", t.ratio);
        out << buf << ',';
        std::snprintf(buf, sizeof buf, "%.17g", t.bound);
        out << buf << ',' << t.rounds << ',' << t.round_budget << ',' << t.max_edge_bits << '\n';
    }
    return out.str();
}

std::vector<PlotRow> parse_plotdata(std::string_view csv) {
    std::vector<PlotRow> rows;
    std::istringstream in{std::string(csv)};
    std::string line;
    if (!std::getline(in, line) || line != "n,D,S,mode,ratio,bound,rounds,round_budget,max_edge_bits") {
        throw ConfigError("plot data has an unexpected header");
    }
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 9) throw ConfigError("plot data line " + std::to_string(line_no) + ": expected 9 cells");
        PlotRow r;
        r.n = parse_number<std::size_t>("n", cells[0]);
        r.diameter = parse_number<Cost>("D", cells[1]);
        r.terminals = parse_number<std::size_t>("S", cells[2]);
        r.mode = parse_mode(cells[3]);
        r.ratio = std::stod(cells[4]);
        r.bound = std::stod(cells[5]);
        r.rounds = parse_number<Slot>("rounds", cells[6]);
        r.round_budget = parse_number<Slot>("round_budget", cells[7]);
        r.max_edge_bits = parse_number<std::size_t>("max_edge_bits", cells[8]);
        rows.push_back(r);
    }
    return rows;
}

Aggregate aggregate_rows(std::span<const PlotRow> rows) {
    Aggregate a;
    for (const auto& r : rows) {
        ++a.trials;
        a.max_ratio = std::max(a.max_ratio, r.ratio);
        if (r.ratio > r.bound * (1 + 1e-12)) ++a.violations;
        Slot roots = (r.round_budget - 10 * static_cast<Slot>(r.diameter)) / 4;
        a.round_constant = std::max(a.round_constant, static_cast<double>(r.rounds) /
                                                          static_cast<double>(roots + r.diameter));
        a.max_edge_bits = std::max(a.max_edge_bits, r.max_edge_bits);
    }
    if (a.trials) a.failure_fraction = static_cast<double>(a.violations) / static_cast<double>(a.trials);
    return a;
}

}  // namespace mrct
