#include "doctest.h"
#include "mrct/mrct.hpp"
#include "mrct/oracle.hpp"

#include <cmath>

using namespace mrct;

TEST_CASE("K5 meets the bound with equality") {
    auto g = generate(GraphKind::clique, 5);
    auto s = TerminalSet::all(g);
    auto r = run_deterministic(g, s);
    CHECK(r.rc_chosen == 32);
    CHECK(oracle::rc_exact(g, s) == 20);
    CHECK(5 * r.rc_chosen == 8 * 20);
    CHECK(r.chosen_root == 1);
    CHECK(r.phase_slots("part1") == 7);
    CHECK(r.phase_slots("part2") == 7);
}

TEST_CASE("paths choose themselves") {
    for (std::size_t n : {3u, 6u, 11u}) {
        auto g = generate(GraphKind::path, n);
        auto s = TerminalSet::all(g);
        auto r = run_deterministic(g, s);
        CHECK(r.rc_chosen == oracle::rc_exact(g, s));
        CHECK(oracle::tree_edges(g, r.tree).size() == n - 1);
    }
}

TEST_CASE("random graph with five terminals stays within 1.6") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto g = generate(GraphKind::random_connected, 20, {.p = 0.2, .seed = seed, .max_delay = 3});
        TerminalSet s(g, {2, 6, 9, 14, 19});
        auto r = run_deterministic(g, s);
        validate_tree(g, r.tree);
        CHECK(oracle::rc_exact(g, r.tree, s) == r.rc_chosen);
        CHECK(5 * r.rc_chosen <= 8 * oracle::rc_exact(g, s));
        CHECK(r.max_edge_bits <= r.bandwidth);
    }
}

TEST_CASE("sampling plan arithmetic") {
    auto plan = sampling_plan(1000, 1000, 10, 0.5);
    CHECK(plan.beta == doctest::Approx(0.5));
    CHECK(plan.gamma == 5);
    CHECK(plan.s == 35);
    CHECK_FALSE(plan.fallback);

    auto huge = sampling_plan(100, 100, 1, 50.0);
    CHECK(huge.gamma == 2);
    CHECK(huge.s == static_cast<std::size_t>(std::ceil(2 * std::log(100.0))));

    CHECK(sampling_plan(16, 5, 4, 1.0).fallback);
    CHECK_THROWS_AS(sampling_plan(16, 5, 4, 0.0), std::invalid_argument);
    ApproxParams bad;
    bad.c_sample = 0.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("small terminal sets fall back to the deterministic pipeline") {
    auto g = generate(GraphKind::random_connected, 12, {.p = 0.4, .seed = 2});
    TerminalSet s(g, {1, 5, 9});
    auto r = run_randomized(g, s, ApproxParams::with_alpha(1.0));
    auto d = run_deterministic(g, s);
    CHECK(r.fallback);
    CHECK(r.rc_chosen == d.rc_chosen);
    CHECK(r.chosen_root == d.chosen_root);
    CHECK(r.sample.size() == 3);
}

TEST_CASE("randomized runs sample s terminals and are reproducible") {
    auto g = generate(GraphKind::random_connected, 64, {.p = 0.13, .seed = 21});
    auto s = TerminalSet::all(g);
    auto a = run_randomized(g, s, ApproxParams::with_alpha(1.0, 77));
    auto b = run_randomized(g, s, ApproxParams::with_alpha(1.0, 77));
    REQUIRE(a.plan);
    CHECK_FALSE(a.fallback);
    CHECK(a.sample.size() == a.plan->s);
    CHECK(a.sample == b.sample);
    CHECK(a.rc_chosen == b.rc_chosen);
    CHECK(a.rounds_used == b.rounds_used);
    CHECK(a.phase_slots("part1") == a.plan->s + 2 * a.d_prime);
    CHECK(oracle::rc_exact(g, a.tree, s) == a.rc_chosen);
    auto c = run_randomized(g, s, ApproxParams::with_alpha(1.0, 78));
    CHECK(c.sample != a.sample);
    Cost D = weighted_diameter(g);
    CHECK(a.rounds_used <= 4 * (a.plan->s + D) + 6 * D);
}

TEST_CASE("on a clique every sample gives the deterministic answer") {
    auto g = generate(GraphKind::clique, 40);
    auto s = TerminalSet::all(g);
    auto r = run_randomized(g, s, ApproxParams::with_alpha(1.0, 5));
    CHECK_FALSE(r.fallback);
    CHECK(r.rc_chosen == run_deterministic(g, s).rc_chosen);
}

TEST_CASE("sampling gives up after ten empty rounds") {
    auto g = generate(GraphKind::clique, 30);
    auto s = TerminalSet::all(g);
    RoundEngine engine(g);
    auto leader = leader_echo(engine, s);
    // Asking for more terminals than exist can never succeed.
    CHECK_THROWS_AS(sample_terminals(engine, s, leader, 31, ApproxParams::with_alpha(1.0)), SamplingFailure);
}

TEST_CASE("announced trees") {
    auto k4 = generate(GraphKind::clique, 4);
    RoundEngine e1(k4);
    auto s4 = TerminalSet::all(k4);
    auto l1 = leader_echo(e1, s4);
    auto t1 = build_trees(e1, s4, l1.d_prime);
    CHECK(announce_tree(e1, l1, t1, 1).tree == ParentMap{kNoNode, kNoNode, 1, 1, 1});

    auto p3 = generate(GraphKind::path, 3);
    RoundEngine e2(p3);
    auto s3 = TerminalSet::all(p3);
    auto l2 = leader_echo(e2, s3);
    auto t2 = build_trees(e2, s3, l2.d_prime);
    CHECK(announce_tree(e2, l2, t2, 3).tree == ParentMap{kNoNode, 2, 3, kNoNode});
}

TEST_CASE("result json") {
    auto g = generate(GraphKind::clique, 5);
    auto s = TerminalSet::all(g);
    auto j = result_json(run_deterministic(g, s), g, s);
    CHECK(j["mode"] == "deterministic");
    CHECK(j["rc_chosen"] == 32);
    CHECK(j["rc_graph_oracle"] == 20);
    CHECK(j["ratio"].get<double>() == doctest::Approx(1.6));
    CHECK(j["sample"].size() == 5);
    CHECK(parse_mode("rand") == Mode::randomized);
    CHECK_THROWS(parse_mode("fast"));
}
