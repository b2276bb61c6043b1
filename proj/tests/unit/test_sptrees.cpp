#include "doctest.h"
#include "mrct/oracle.hpp"
#include "mrct/sptrees.hpp"

using namespace mrct;

namespace {

Graph relabeled_p3_center_1() {
    std::vector<Edge> e{{1, 2, 1}, {1, 3, 1}};
    return Graph::from_edges(3, e);
}

}  // namespace

TEST_CASE("D' on small graphs") {
    auto k4 = generate(GraphKind::clique, 4);
    RoundEngine e1(k4);
    auto d1 = compute_dprime(e1, TerminalSet::all(k4));
    CHECK(d1.value() == 1);
    CHECK(d1.leader.node_count == 4);
    CHECK(d1.leader.terminal_count == 4);
    for (NodeId u = 1; u <= 4; ++u) CHECK(d1.at_node[u] == 1);

    auto p3 = generate(GraphKind::path, 3);
    RoundEngine e2(p3);
    CHECK(compute_dprime(e2, TerminalSet::all(p3)).value() == 2);

    auto c = relabeled_p3_center_1();
    RoundEngine e3(c);
    auto d3 = compute_dprime(e3, TerminalSet(c, {2, 3}));
    CHECK(d3.value() == 1);
    CHECK(d3.leader.terminal_count == 2);
    CHECK(weighted_diameter(c) <= 2 * d3.value());
}

TEST_CASE("leader tree is a shortest-path tree with correct distances") {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        GenerateOptions o;
        o.seed = seed;
        o.p = 0.2;
        o.max_delay = seed % 2 ? 1 : 4;
        auto g = generate(GraphKind::random_connected, 18, o);
        RoundEngine engine(g);
        auto info = leader_echo(engine, TerminalSet::all(g));
        auto d = distances_from(g, 1);
        CHECK(info.d_prime == eccentricity(g, 1));
        for (NodeId u = 1; u <= g.node_count(); ++u) {
            CHECK(info.dist[u] == d[u]);
            if (u != 1) CHECK(info.dist[info.tree[u]] + g.delay(u, info.tree[u]) == d[u]);
        }
    }
}

TEST_CASE("P3 with roots at the ends") {
    auto g = generate(GraphKind::path, 3);
    RoundEngine engine(g);
    TerminalSet s(g, {1, 3});
    auto trees = build_trees(engine, s, 2);
    CHECK(trees.budget == 6);
    CHECK(trees.report.charged_slots() == 6);
    auto k1 = *trees.root_index(1);
    auto k3 = *trees.root_index(3);
    CHECK(trees.entry(2, k1).omega == 1);
    CHECK(trees.entry(2, k3).omega == 1);
    CHECK(trees.entry(3, k1).omega == 2);
    CHECK(trees.parent(g, 3, k1) == 2);
    CHECK(trees.parent(g, 2, k1) == 1);
    CHECK(trees.parent(g, 1, k1) == kNoNode);
}

TEST_CASE("K4 with every node a root") {
    auto g = generate(GraphKind::clique, 4);
    RoundEngine engine(g);
    auto trees = build_trees(engine, TerminalSet::all(g), 1);
    CHECK(trees.report.charged_slots() == 6);
    for (NodeId u = 1; u <= 4; ++u) {
        for (std::size_t k = 0; k < 4; ++k) {
            CHECK(trees.entry(u, k).omega == (trees.roots[k] == u ? 0 : 1));
        }
    }
}

TEST_CASE("a delay-3 edge gives tau 3 at the far end") {
    std::vector<Edge> e{{1, 2, 3}};
    auto g = Graph::from_edges(2, e);
    RoundEngine engine(g);
    auto trees = build_trees(engine, TerminalSet::all(g), 3);
    CHECK(trees.entry(2, 0).tau == 3);
    CHECK(trees.entry(1, 1).tau == 3);
    CHECK(trees.entry(2, 0).omega == 3);
}

TEST_CASE("too small a budget is reported, not hidden") {
    auto g = generate(GraphKind::path, 8);
    RoundEngine engine(g);
    CHECK_THROWS_AS(build_trees(engine, TerminalSet(g, {1, 8}), 1), CorrectnessViolation);
}

TEST_CASE("omega tables match all-pairs distances on random graphs") {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        GenerateOptions o;
        o.seed = seed;
        o.p = 0.2;
        o.max_delay = seed % 3 == 0 ? 4 : 1;
        auto g = generate(GraphKind::random_connected, 20, o);
        RoundEngine engine(g);
        auto s = TerminalSet::all(g);
        auto dp = compute_dprime(engine, s);
        auto trees = build_trees(engine, s, dp.value());
        auto d = oracle::apsp(g);
        for (NodeId u = 1; u <= g.node_count(); ++u) {
            for (std::size_t k = 0; k < trees.roots.size(); ++k) {
                CHECK(trees.entry(u, k).omega == d(u, trees.roots[k]));
            }
        }
        CHECK(trees.max_tau() < trees.budget);
        for (std::size_t k = 0; k < trees.roots.size(); ++k) validate_tree(g, trees.tree_of(g, k));
    }
}

TEST_CASE("SSRC by wave agrees with the local sum and the oracle") {
    auto k4 = generate(GraphKind::clique, 4);
    RoundEngine e1(k4);
    auto s4 = TerminalSet::all(k4);
    auto t4 = build_trees(e1, s4, 1);
    auto w4 = compute_ssrc(e1, t4, s4);
    for (auto v : w4.by_root) CHECK(v == 3);

    auto p3 = generate(GraphKind::path, 3);
    RoundEngine e2(p3);
    auto s3 = TerminalSet::all(p3);
    auto t3 = build_trees(e2, s3, 2);
    auto w3 = compute_ssrc(e2, t3, s3);
    CHECK(w3.by_root == std::vector<Cost>{3, 2, 3});
    CHECK(*local_ssrc(t3, s3, 1) == 2);

    auto star = generate(GraphKind::star, 7);
    RoundEngine e3(star);
    auto s7 = TerminalSet::all(star);
    auto t7 = build_trees(e3, s7, 1);
    CHECK(compute_ssrc(e3, t7, s7).by_root[0] == 6);

    GenerateOptions o;
    o.seed = 4;
    o.p = 0.3;
    o.max_delay = 4;
    auto g = generate(GraphKind::random_connected, 16, o);
    RoundEngine engine(g);
    TerminalSet s(g, {2, 5, 7, 11, 16});
    auto dp = compute_dprime(engine, s);
    auto trees = build_trees(engine, s, dp.value());
    auto wave = compute_ssrc(engine, trees, s);
    auto d = oracle::apsp(g);
    for (std::size_t k = 0; k < trees.roots.size(); ++k) {
        CHECK(wave.by_root[k] == oracle::ssrc_exact(d, s.members(), trees.roots[k]));
        CHECK(*local_ssrc(trees, s, k) == wave.by_root[k]);
    }
    CHECK(wave.report.charged_slots() == trees.budget);
}

TEST_CASE("tree table dump") {
    auto g = generate(GraphKind::path, 3);
    RoundEngine engine(g);
    auto trees = build_trees(engine, TerminalSet(g, {1, 3}), 2);
    auto j = tree_tables_json(trees);
    CHECK(j["3"]["1"]["omega"] == 2);
    CHECK(j["1"]["1"]["parent_edge"].is_null());
    CHECK(j["2"]["3"]["parent_edge"] == 1);
}
