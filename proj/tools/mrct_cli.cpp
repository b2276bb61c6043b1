#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "mrct/experiment.hpp"
#include "mrct/mrct.hpp"
#include "mrct/oracle.hpp"
#include "mrct/routing_cost.hpp"

namespace {

using namespace mrct;

struct GraphFlags {
    std::string graph = "random_connected";
    std::size_t n = 16;
    double p = 0.3;
    Delay max_delay = 1;
    std::uint64_t seed = 1;
    std::string input;
    std::string terminals = "all";
};

void add_graph_flags(CLI::App* cmd, GraphFlags& f) {
    cmd->add_option("--graph", f.graph, "clique, path, grid, random_connected, star, cycle, random_tree");
    cmd->add_option("--n", f.n, "number of nodes");
    cmd->add_option("--p", f.p, "edge probability for random_connected");
    cmd->add_option("--max-delay", f.max_delay, "edge delays drawn from [1, max-delay]");
    cmd->add_option("--seed", f.seed, "seed for generation and sampling");
    cmd->add_option("--input", f.input, "edge-list file instead of a generated graph");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

Graph load_graph(const GraphFlags& f) {
    if (!f.input.empty()) return load_edge_list(read_file(f.input));
    GenerateOptions opts;
    opts.p = f.p;
    opts.seed = f.seed;
    opts.max_delay = f.max_delay;
    return generate(parse_graph_kind(f.graph), f.n, opts);
}

TerminalSet load_terminals(const Graph& g, const GraphFlags& f) {
    return choose_terminals(g, f.terminals, f.seed);
}

int cmd_gen(const GraphFlags& f, const std::string& out) {
    write_output(out, save_edge_list(load_graph(f)));
    return 0;
}

int cmd_run(const GraphFlags& f, const std::string& mode, double alpha, bool tables, const std::string& out) {
    Graph g = load_graph(f);
    TerminalSet s = load_terminals(g, f);
    Mode m = parse_mode(mode);
    auto result = m == Mode::deterministic ? run_deterministic(g, s)
                                           : run_randomized(g, s, ApproxParams::with_alpha(alpha, f.seed));
    auto j = result_json(result, g, s);
    j["d_prime"] = result.d_prime;
    j["part1_slots"] = result.phase_slots("part1");
    j["part2_slots"] = result.phase_slots("part2");
    j["bandwidth"] = result.bandwidth;
    nlohmann::json parents = nlohmann::json::object();
    for (NodeId u = 1; u <= g.node_count(); ++u) {
        parents[std::to_string(u)] = result.tree[u] == kNoNode ? nlohmann::json(nullptr) : nlohmann::json(result.tree[u]);
    }
    j["tree"] = std::move(parents);
    if (result.plan) j["plan"] = {{"beta", result.plan->beta}, {"gamma", result.plan->gamma}, {"s", result.plan->s},
                                  {"fallback", result.plan->fallback}, {"attempts", result.attempts}};
    if (tables) {
        j["tables"] = tree_tables_json(result.trees);
        j["costs"] = routing_costs_json(result.costs);
    }
    write_output(out, j.dump(2) + "\n");

    Cost rc_graph = j["rc_graph_oracle"].get<Cost>();
    bool ok = oracle::rc_exact(g, result.tree, s) == result.rc_chosen;
    if (m == Mode::deterministic || result.fallback) {
        auto k = static_cast<__int128>(s.size());
        ok = ok && k * result.rc_chosen <= (2 * k - 2) * static_cast<__int128>(rc_graph);
    }
    if (!ok) std::cerr << "invariant violated: chosen tree misses its bound\n";
    return ok ? 0 : 1;
}

int cmd_oracle(const GraphFlags& f, const std::string& out) {
    Graph g = load_graph(f);
    TerminalSet s = load_terminals(g, f);
    auto d = oracle::apsp(g);
    nlohmann::json j;
    j["n"] = g.node_count();
    j["m"] = g.edge_count();
    j["diameter"] = weighted_diameter(g);
    j["rc_graph"] = oracle::rc_exact(d, s.members());
    nlohmann::json ssrc = nlohmann::json::object();
    for (NodeId u : s.members()) ssrc[std::to_string(u)] = oracle::ssrc_exact(d, s.members(), u);
    j["ssrc"] = std::move(ssrc);
    try {
        auto best = oracle::mrct_exact(g, s);
        j["mrct_exact"] = best.cost;
        j["trees_enumerated"] = best.trees_enumerated;
    } catch (const oracle::BudgetExceeded& e) {
        j["mrct_exact"] = nullptr;
        j["mrct_exact_skipped"] = e.what();
    }
    write_output(out, j.dump(2) + "\n");
    return 0;
}

int cmd_report(const std::string& config_path, const std::vector<std::pair<std::string, std::string>>& overrides,
               const std::string& csv) {
    ExperimentConfig config = config_path.empty() ? ExperimentConfig{} : parse_config(read_file(config_path));
    for (const auto& [k, v] : overrides) config.set(k, v);
    auto report = run_experiment(config);
    write_output(config.out, report_json(report).dump(2) + "\n");
    if (!csv.empty()) write_output(csv, emit_plotdata(report));
    auto a = report.aggregate();
    std::cerr << "trials " << a.trials << "  max ratio " << a.max_ratio << "  violations " << a.violations
              << "  round constant " << a.round_constant << "  max edge bits " << a.max_edge_bits << "\n";
    return report.all_ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distributed S-MRCT approximation on a CONGEST simulator"};
    app.require_subcommand(1);

    GraphFlags gen_flags, run_flags, oracle_flags;
    std::string gen_out, run_out, oracle_out, mode = "det";
    double alpha = 1.0;
    bool tables = false;

    auto* gen = app.add_subcommand("gen", "generate a graph as an edge list");
    add_graph_flags(gen, gen_flags);
    gen->add_option("--out", gen_out, "output file (stdout when omitted)");

    auto* run = app.add_subcommand("run", "run the distributed pipeline once");
    add_graph_flags(run, run_flags);
    run->add_option("--terminals", run_flags.terminals, "all, random, random:<k> or a comma list");
    run->add_option("--mode", mode, "det or rand");
    run->add_option("--alpha", alpha, "tradeoff parameter for rand mode");
    run->add_flag("--tables", tables, "include per-node tree and cost tables");
    run->add_option("--out", run_out, "output file (stdout when omitted)");

    auto* orc = app.add_subcommand("oracle", "centralized distances, routing costs and exact optimum");
    add_graph_flags(orc, oracle_flags);
    orc->add_option("--terminals", oracle_flags.terminals, "all, random, random:<k> or a comma list");
    orc->add_option("--out", oracle_out, "output file (stdout when omitted)");

    auto* rep = app.add_subcommand("report", "run an experiment and write a JSON report");
    std::string config_path, csv;
    rep->add_option("--config", config_path, "key = value experiment file");
    rep->add_option("--csv", csv, "also write plot data here");
    std::map<std::string, std::string> flag_values;
    for (const char* key : {"graph", "n", "p", "max-delay", "terminals", "mode", "alpha", "seed", "seeds", "trials",
                            "exact", "threads", "out"}) {
        rep->add_option(std::string("--") + key, flag_values[key]);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*gen) return cmd_gen(gen_flags, gen_out);
        if (*run) return cmd_run(run_flags, mode, alpha, tables, run_out);
        if (*orc) return cmd_oracle(oracle_flags, oracle_out);
        std::vector<std::pair<std::string, std::string>> overrides;
        for (const auto& [k, v] : flag_values) {
            if (rep->count("--" + k) > 0) overrides.emplace_back(k, v);
        }
        return cmd_report(config_path, overrides, csv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
