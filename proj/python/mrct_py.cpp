#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mrct/experiment.hpp"
#include "mrct/mrct.hpp"
#include "mrct/oracle.hpp"
#include "mrct/routing_cost.hpp"

namespace py = pybind11;
using namespace mrct;

namespace {

TerminalSet terminals_or_all(const Graph& g, const std::optional<std::vector<NodeId>>& terminals) {
    return terminals ? TerminalSet(g, *terminals) : TerminalSet::all(g);
}

std::string run_json(const Graph& g, const TerminalSet& s, const MrctResult& r, bool tables) {
    auto j = result_json(r, g, s);
    j["d_prime"] = r.d_prime;
    j["part1_slots"] = r.phase_slots("part1");
    j["part2_slots"] = r.phase_slots("part2");
    j["bandwidth"] = r.bandwidth;
    std::vector<NodeId> parents(r.tree.begin() + 1, r.tree.end());
    j["parents"] = parents;
    if (r.plan) j["plan"] = {{"beta", r.plan->beta}, {"gamma", r.plan->gamma}, {"s", r.plan->s}, {"fallback", r.plan->fallback}};
    if (tables) {
        j["tables"] = tree_tables_json(r.trees);
        j["costs"] = routing_costs_json(r.costs);
    }
    return j.dump();
}

}  // namespace

PYBIND11_MODULE(_mrct, m) {
    m.doc() = "S-MRCT approximation on a CONGEST simulator";

    py::register_exception<GraphError>(m, "GraphError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<BandwidthViolation>(m, "BandwidthViolation");
    py::register_exception<oracle::BudgetExceeded>(m, "BudgetExceeded");

    py::class_<Edge>(m, "Edge")
        .def_readonly("u", &Edge::u)
        .def_readonly("v", &Edge::v)
        .def_readonly("delay", &Edge::delay)
        .def("__repr__", [](const Edge& e) {
            return "Edge(" + std::to_string(e.u) + ", " + std::to_string(e.v) + ", " + std::to_string(e.delay) + ")";
        });

    py::class_<Graph>(m, "Graph")
        .def_static("from_edges",
                    [](std::size_t n, const std::vector<std::tuple<NodeId, NodeId, Delay>>& edges) {
                        std::vector<Edge> es;
                        for (auto [u, v, w] : edges) es.push_back({u, v, w});
                        return Graph::from_edges(n, es);
                    },
                    py::arg("n"), py::arg("edges"))
        .def_property_readonly("node_count", &Graph::node_count)
        .def_property_readonly("edge_count", &Graph::edge_count)
        .def("edges", [](const Graph& g) {
            std::vector<std::tuple<NodeId, NodeId, Delay>> out;
            for (const auto& e : g.edges()) out.emplace_back(e.u, e.v, e.delay);
            return out;
        })
        .def("diameter", [](const Graph& g) { return weighted_diameter(g); })
        .def("eccentricity", [](const Graph& g, NodeId u) { return eccentricity(g, u); })
        .def("to_text", [](const Graph& g) { return save_edge_list(g); });

    m.def("generate",
          [](const std::string& kind, std::size_t n, double p, std::uint64_t seed, Delay max_delay) {
              return generate(parse_graph_kind(kind), n, GenerateOptions{p, seed, max_delay});
          },
          py::arg("kind"), py::arg("n"), py::arg("p") = 0.5, py::arg("seed") = 1, py::arg("max_delay") = 1);
    m.def("load_edge_list", [](const std::string& text) { return load_edge_list(text); }, py::arg("text"));

    m.def("_run_deterministic",
          [](const Graph& g, std::optional<std::vector<NodeId>> terminals, bool tables) {
              auto s = terminals_or_all(g, terminals);
              MrctResult r;
              {
                  py::gil_scoped_release release;
                  r = run_deterministic(g, s);
              }
              return run_json(g, s, r, tables);
          },
          py::arg("graph"), py::arg("terminals") = py::none(), py::arg("tables") = false);
    m.def("_run_randomized",
          [](const Graph& g, std::optional<std::vector<NodeId>> terminals, double alpha, std::uint64_t seed,
             bool tables) {
              auto s = terminals_or_all(g, terminals);
              MrctResult r;
              {
                  py::gil_scoped_release release;
                  r = run_randomized(g, s, ApproxParams::with_alpha(alpha, seed));
              }
              return run_json(g, s, r, tables);
          },
          py::arg("graph"), py::arg("terminals") = py::none(), py::arg("alpha") = 1.0, py::arg("seed") = 1,
          py::arg("tables") = false);

    m.def("sampling_plan",
          [](std::size_t n, std::size_t terminal_count, Cost diameter, double alpha) {
              auto p = sampling_plan(n, terminal_count, diameter, alpha);
              return py::dict(py::arg("beta") = p.beta, py::arg("gamma") = p.gamma, py::arg("s") = p.s,
                              py::arg("fallback") = p.fallback);
          },
          py::arg("n"), py::arg("terminal_count"), py::arg("diameter"), py::arg("alpha"));

    m.def("apsp", [](const Graph& g) {
        auto d = oracle::apsp(g);
        std::vector<std::vector<Cost>> out(g.node_count(), std::vector<Cost>(g.node_count()));
        for (NodeId u = 1; u <= g.node_count(); ++u) {
            for (NodeId v = 1; v <= g.node_count(); ++v) out[u - 1][v - 1] = d(u, v);
        }
        return out;
    });
    m.def("rc_graph",
          [](const Graph& g, std::optional<std::vector<NodeId>> terminals) {
              return oracle::rc_exact(g, terminals_or_all(g, terminals));
          },
          py::arg("graph"), py::arg("terminals") = py::none());
    m.def("rc_tree",
          [](const Graph& g, const std::vector<NodeId>& parents, std::optional<std::vector<NodeId>> terminals) {
              ParentMap tree{kNoNode};
              tree.insert(tree.end(), parents.begin(), parents.end());
              return oracle::rc_exact(g, tree, terminals_or_all(g, terminals));
          },
          py::arg("graph"), py::arg("parents"), py::arg("terminals") = py::none());
    m.def("mrct_exact",
          [](const Graph& g, std::optional<std::vector<NodeId>> terminals) {
              auto best = oracle::mrct_exact(g, terminals_or_all(g, terminals));
              std::vector<std::tuple<NodeId, NodeId, Delay>> edges;
              for (const auto& e : best.tree) edges.emplace_back(e.u, e.v, e.delay);
              return py::dict(py::arg("cost") = best.cost, py::arg("tree") = edges,
                              py::arg("trees_enumerated") = best.trees_enumerated);
          },
          py::arg("graph"), py::arg("terminals") = py::none());

    m.def("_run_experiment",
          [](const std::string& config_text, const std::vector<std::pair<std::string, std::string>>& overrides) {
              auto config = parse_config(config_text);
              for (const auto& [k, v] : overrides) config.set(k, v);
              ExperimentReport report;
              {
                  py::gil_scoped_release release;
                  report = run_experiment(config);
              }
              return py::make_tuple(report_json(report).dump(), emit_plotdata(report));
          },
          py::arg("config_text"), py::arg("overrides"));
}
