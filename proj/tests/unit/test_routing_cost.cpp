#include "doctest.h"
#include "mrct/oracle.hpp"
#include "mrct/routing_cost.hpp"

#include <limits>

using namespace mrct;

TEST_CASE("edge term") {
    for (std::uint64_t n = 4; n <= 10; ++n) CHECK(rc_formula(2, n, 1) == static_cast<Cost>(2 * 2 * (n - 2)));
    CHECK(rc_formula(0, 7, 3) == 0);
    CHECK(rc_formula(7, 7, 3) == 0);
    CHECK(rc_formula(1, 2, 4) == 8);
    CHECK_THROWS_AS(rc_formula(8, 7, 1), std::invalid_argument);
    CHECK_THROWS_AS(rc_formula(1ULL << 40, 1ULL << 41, 1u << 30), std::overflow_error);
}

TEST_CASE("P3 rooted at the center") {
    auto g = generate(GraphKind::path, 3);
    RoundEngine engine(g);
    auto s = TerminalSet::all(g);
    auto trees = build_trees(engine, s, 2);
    auto costs = compute_all_rc(engine, trees, s);
    CHECK(costs.rc[*trees.root_index(2)] == 8);
    CHECK(costs.tables[1].z[*trees.root_index(2)] == 1);
    CHECK(costs.tables[2].z[*trees.root_index(2)] == 3);
    CHECK(costs.report.charged_slots() == trees.budget);
}

TEST_CASE("cliques give stars of cost 2(n-1)^2") {
    for (std::size_t n = 4; n <= 9; ++n) {
        auto g = generate(GraphKind::clique, n);
        RoundEngine engine(g);
        auto s = TerminalSet::all(g);
        auto trees = build_trees(engine, s, 1);
        auto costs = compute_all_rc(engine, trees, s);
        for (std::size_t k = 0; k < n; ++k) {
            CHECK(costs.rc[k] == static_cast<Cost>(2 * (n - 1) * (n - 1)));
            CHECK(oracle_rc_check(g, trees, s, k, costs.rc[k]));
        }
    }
}

TEST_CASE("two terminals cost twice their distance in every tree") {
    GenerateOptions o;
    o.seed = 9;
    o.p = 0.3;
    o.max_delay = 4;
    auto g = generate(GraphKind::random_connected, 14, o);
    RoundEngine engine(g);
    TerminalSet s(g, {3, 12});
    auto dp = compute_dprime(engine, s);
    auto trees = build_trees(engine, s, dp.value());
    auto costs = compute_all_rc(engine, trees, s);
    Cost d = distances_from(g, 3)[12];
    CHECK(costs.rc[0] == 2 * d);
    CHECK(costs.rc[1] == 2 * d);
}

TEST_CASE("distributed costs match the extracted trees") {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        GenerateOptions o;
        o.seed = seed;
        o.p = 0.25;
        o.max_delay = seed % 2 ? 4 : 1;
        auto g = generate(GraphKind::random_connected, 15, o);
        RoundEngine engine(g);
        auto s = seed % 3 ? TerminalSet::all(g) : TerminalSet(g, {1, 4, 9, 13});
        auto dp = compute_dprime(engine, s);
        auto trees = build_trees(engine, s, dp.value());
        auto costs = compute_all_rc(engine, trees, s);
        for (std::size_t k = 0; k < trees.roots.size(); ++k) {
            CHECK(oracle_rc_check(g, trees, s, k, costs.rc[k]));
        }
    }
}

TEST_CASE("a corrupted count is caught by the check") {
    auto g = generate(GraphKind::path, 5);
    RoundEngine engine(g);
    auto s = TerminalSet(g, {1, 2, 3, 5});
    auto trees = build_trees(engine, s, 4);
    auto costs = compute_all_rc(engine, trees, s, {.corrupt_z_at = 3});
    CHECK_FALSE(oracle_rc_check(g, trees, s, *trees.root_index(5), costs.rc[*trees.root_index(5)]));
}

TEST_CASE("cost json") {
    auto g = generate(GraphKind::clique, 4);
    RoundEngine engine(g);
    auto s = TerminalSet::all(g);
    auto trees = build_trees(engine, s, 1);
    auto costs = compute_all_rc(engine, trees, s);
    std::vector<Cost> ssrc(4, 3);
    auto j = routing_costs_json(costs, &ssrc);
    CHECK(j["2"]["rc"] == 18);
    CHECK(j["2"]["ssrc"] == 3);
    CHECK(routing_costs_json(costs)["1"]["ssrc"].is_null());
}
