#include "doctest.h"
#include "mrct/oracle.hpp"

using namespace mrct;

TEST_CASE("apsp") {
    auto k4 = generate(GraphKind::clique, 4);
    auto d = oracle::apsp(k4);
    for (NodeId u = 1; u <= 4; ++u) {
        for (NodeId v = 1; v <= 4; ++v) CHECK(d(u, v) == (u == v ? 0 : 1));
    }
    CHECK(oracle::apsp(generate(GraphKind::path, 3))(1, 3) == 2);

    GenerateOptions o;
    o.seed = 2;
    o.p = 0.3;
    o.max_delay = 4;
    auto g = generate(GraphKind::random_connected, 20, o);
    auto m = oracle::apsp(g);
    for (NodeId u = 1; u <= 20; ++u) {
        auto row = distances_from(g, u);
        for (NodeId v = 1; v <= 20; ++v) CHECK(m(u, v) == row[v]);
    }
}

TEST_CASE("graph routing costs") {
    for (std::size_t n = 3; n <= 9; ++n) {
        auto k = generate(GraphKind::clique, n);
        CHECK(oracle::rc_exact(k, TerminalSet::all(k)) == static_cast<Cost>(n * (n - 1)));
        auto star = generate(GraphKind::star, n);
        CHECK(oracle::rc_exact(star, TerminalSet::all(star)) == static_cast<Cost>(2 * (n - 1) * (n - 1)));
    }
    auto p3 = generate(GraphKind::path, 3);
    CHECK(oracle::rc_exact(p3, TerminalSet::all(p3)) == 8);
}

TEST_CASE("exact minimum routing cost trees") {
    auto k4 = generate(GraphKind::clique, 4);
    auto best = oracle::mrct_exact(k4, TerminalSet::all(k4));
    CHECK(best.cost == 18);
    CHECK(best.trees_enumerated == 16);

    auto c4 = generate(GraphKind::cycle, 4);
    auto c = oracle::mrct_exact(c4, TerminalSet::all(c4));
    CHECK(c.trees_enumerated == 4);
    CHECK(c.cost == 20);

    auto tree = generate(GraphKind::random_tree, 9, {.seed = 5});
    auto t = oracle::mrct_exact(tree, TerminalSet::all(tree));
    CHECK(t.trees_enumerated == 1);
    CHECK(t.cost == oracle::rc_exact(tree, TerminalSet::all(tree)));

    CHECK(oracle::mrct_exact(generate(GraphKind::clique, 5), TerminalSet::all(generate(GraphKind::clique, 5)))
              .trees_enumerated == 125);
    CHECK_THROWS_AS(oracle::mrct_exact(generate(GraphKind::clique, 10), TerminalSet::all(generate(GraphKind::clique, 10))),
                    oracle::BudgetExceeded);
    auto long_path = generate(GraphKind::path, 14);
    CHECK(oracle::mrct_exact(long_path, TerminalSet::all(long_path)).trees_enumerated == 1);
}

TEST_CASE("single-source costs sum to the graph cost") {
    auto k4 = generate(GraphKind::clique, 4);
    auto d4 = oracle::apsp(k4);
    auto s4 = TerminalSet::all(k4);
    CHECK(oracle::ssrc_exact(d4, s4.members(), 1) == 3);

    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto g = generate(GraphKind::random_connected, 12, {.p = 0.3, .seed = seed, .max_delay = 3});
        auto d = oracle::apsp(g);
        TerminalSet s(g, {1, 2, 6, 7, 11});
        Cost sum = 0;
        for (NodeId u : s.members()) sum += oracle::ssrc_exact(d, s.members(), u);
        CHECK(sum == oracle::rc_exact(d, s.members()));
    }
}

TEST_CASE("reference shortest-path tree") {
    auto g = generate(GraphKind::random_connected, 15, {.p = 0.3, .seed = 3, .max_delay = 4});
    auto d = oracle::apsp(g);
    for (NodeId root : {1u, 7u, 15u}) {
        auto tree = oracle::bfs_tree_reference(g, root);
        CHECK(validate_tree(g, tree) == root);
        auto edges = oracle::tree_edges(g, tree);
        auto td = oracle::apsp(g.node_count(), edges);
        for (NodeId u = 1; u <= g.node_count(); ++u) CHECK(td(root, u) == d(root, u));
    }
    auto k4 = generate(GraphKind::clique, 4);
    CHECK(oracle::bfs_tree_reference(k4, 3) == ParentMap{kNoNode, 3, 3, kNoNode, 3});
}
