"""
Name-matching engine.

Public API:
- compute_scores
- find_composition
- reduce_composition
- reduce_until_fixpoint
- solve_name
"""

from .scores import GOAL_SEED, ScoreTable, compute_scores, producers_index
from .search import SearchState, find_composition
from .reduction import reduce_composition, reduce_until_fixpoint
from .solver import solve_name

__all__ = [
    "GOAL_SEED",
    "ScoreTable",
    "compute_scores",
    "producers_index",
    "SearchState",
    "find_composition",
    "reduce_composition",
    "reduce_until_fixpoint",
    "solve_name",
]
