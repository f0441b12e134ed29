"""Cop versus drunk robber on graphs: strategies, exact solvers and lemma checkers."""

from .graph import Graph, DistanceField, build, bfs, girth, geodesic_next, regularity, read_graph, write_graph
from .engine import GameConfig, TrialOutcome, SimulationReport, play_game, monte_carlo
from .policies import make_policy
from .analysis import ValueTable, exact_expected_capture, optimal_capture_values, hitting_times, tstep_distribution

__version__ = "0.1.0"

__all__ = [
    "Graph", "DistanceField", "build", "bfs", "girth", "geodesic_next", "regularity", "read_graph", "write_graph",
    "GameConfig", "TrialOutcome", "SimulationReport", "play_game", "monte_carlo", "make_policy",
    "ValueTable", "exact_expected_capture", "optimal_capture_values", "hitting_times", "tstep_distribution",
]
