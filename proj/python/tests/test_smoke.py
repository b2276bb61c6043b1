import pytest

import mrct


def test_clique_is_tight():
    g = mrct.generate("clique", 5)
    r = mrct.run_deterministic(g)
    assert r["rc_chosen"] == 32
    assert r["rc_graph_oracle"] == 20
    assert r["ratio"] == pytest.approx(1.6)
    assert r["part1_slots"] == r["part2_slots"] == 7


def test_tree_matches_oracle():
    g = mrct.generate("random_connected", 18, p=0.25, seed=4, max_delay=3)
    r = mrct.run_deterministic(g, terminals=[1, 5, 9, 12, 17])
    assert mrct.rc_tree(g, r["parents"], [1, 5, 9, 12, 17]) == r["rc_chosen"]
    assert 5 * r["rc_chosen"] <= 8 * mrct.rc_graph(g, [1, 5, 9, 12, 17])
    assert r["max_edge_bits"] <= r["bandwidth"]


def test_randomized_is_reproducible():
    g = mrct.generate("random_connected", 64, p=0.13, seed=21)
    a = mrct.run_randomized(g, alpha=1.0, seed=9)
    b = mrct.run_randomized(g, alpha=1.0, seed=9)
    assert a["sample"] == b["sample"]
    assert len(a["sample"]) == a["plan"]["s"]
    assert a["ratio"] <= a["bound"]


def test_oracles():
    k4 = mrct.generate("clique", 4)
    best = mrct.mrct_exact(k4)
    assert best["cost"] == 18
    assert best["trees_enumerated"] == 16
    assert mrct.apsp(mrct.generate("path", 3))[0][2] == 2
    with pytest.raises(mrct.BudgetExceeded):
        mrct.mrct_exact(mrct.generate("clique", 10))


def test_sampling_plan():
    plan = mrct.sampling_plan(1000, 1000, 10, 0.5)
    assert (plan["gamma"], plan["s"]) == (5, 35)


def test_edge_lists_and_errors():
    g = mrct.load_edge_list("3\n1 2 1\n2 3 1\n")
    assert g.edges() == [(1, 2, 1), (2, 3, 1)]
    assert mrct.load_edge_list(g.to_text()).edges() == g.edges()
    with pytest.raises(mrct.GraphError):
        mrct.load_edge_list("2\n1 2 0\n")


def test_experiment():
    report, csv = mrct.run_experiment("graph = clique\n", n=6, trials=2)
    assert report["ok"]
    assert report["aggregate"]["max_ratio"] == pytest.approx(2 - 2 / 6)
    assert csv.count("\n") == 3
    with pytest.raises(mrct.ConfigError):
        mrct.run_experiment("colour = red\n")
