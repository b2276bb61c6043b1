"""S-MRCT approximation on a CONGEST simulator."""

import json

from ._mrct import (
    BandwidthViolation,
    BudgetExceeded,
    ConfigError,
    Graph,
    GraphError,
    apsp,
    generate,
    load_edge_list,
    mrct_exact,
    rc_graph,
    rc_tree,
    sampling_plan,
)
from . import _mrct

__all__ = [
    "BandwidthViolation",
    "BudgetExceeded",
    "ConfigError",
    "Graph",
    "GraphError",
    "apsp",
    "generate",
    "load_edge_list",
    "mrct_exact",
    "rc_graph",
    "rc_tree",
    "run_deterministic",
    "run_experiment",
    "run_randomized",
    "sampling_plan",
]


def run_deterministic(graph, terminals=None, tables=False):
    return json.loads(_mrct._run_deterministic(graph, terminals, tables))


def run_randomized(graph, terminals=None, alpha=1.0, seed=1, tables=False):
    return json.loads(_mrct._run_randomized(graph, terminals, alpha, seed, tables))


def run_experiment(config_text="", **overrides):
    """Returns (report dict, plot CSV text). Keyword arguments override config keys."""
    pairs = [(key, str(value)) for key, value in overrides.items()]
    report, csv = _mrct._run_experiment(config_text, pairs)
    return json.loads(report), csv
