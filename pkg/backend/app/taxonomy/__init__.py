"""
Hierarchical (taxonomy) model.

Public API:
- Taxonomy, EulerIndex
- build_euler_index
- subsumes / subsumes_set
- find_composition_hierarchical
- execution_path
- validate_hierarchical
- build_hierarchical_problem
"""

from .model import EulerIndex, Taxonomy, build_euler_index, subsumes, subsumes_set
from .engine import (
    expand_problem,
    execution_path,
    find_composition_hierarchical,
    validate_hierarchical,
)
from .loader import build_hierarchical_problem

__all__ = [
    "EulerIndex",
    "Taxonomy",
    "build_euler_index",
    "subsumes",
    "subsumes_set",
    "expand_problem",
    "execution_path",
    "find_composition_hierarchical",
    "validate_hierarchical",
    "build_hierarchical_problem",
]
