"""Desk-scale Hamilton cycle machinery for dense regular digraphs and
oriented graphs: expansion witnesses, k^2-partitions, balancing path systems,
contraction, identification lifting, counterexample generators, and an exact
Hamiltonicity oracle."""

from .graph import (
    Digraph,
    GraphProfile,
    PathSystem,
    edges_between,
    graph_profile,
    is_path_system,
    verify_hamilton_cycle,
)
from .oracle import OracleResult, find_hamilton_exact

__version__ = "0.1.0"
