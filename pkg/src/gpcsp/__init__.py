"""Graphplan-style STRIPS planning framed as dynamic constraint satisfaction."""

from .graph import PlanningGraph, fig1_graph
from .memostore import Memo, MemoTable
from .model import Problem, generate_instance, ground, load_instance, parse_domain, parse_problem
from .restart import RestartPolicy, run_with_restarts, solvability_experiment
from .search import ConfigError, Plan, SearchConfig, SearchStats, Trace, solve

__all__ = [
    "ConfigError", "Memo", "MemoTable", "Plan", "PlanningGraph", "Problem", "RestartPolicy", "SearchConfig",
    "SearchStats", "Trace", "fig1_graph", "generate_instance", "ground", "load_instance", "parse_domain",
    "parse_problem", "run_with_restarts", "solvability_experiment", "solve",
]
__version__ = "0.1.0"
