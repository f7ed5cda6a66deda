"""
Object-oriented engine.

Public API:
- ConceptTree, PartialConcept, OOService, OOQuery
- build_oo_problem
- initialize / call_web_service / find_comp
- reduce_oo
- validate_oo
"""

from .tree import (
    GOAL_SERVICE,
    INIT_SERVICE,
    PRESENCE,
    ConceptTree,
    OOQuery,
    OOService,
    PartialConcept,
    build_oo_problem,
    partials_json,
)
from .engine import EngineState, call_web_service, find_comp, initialize
from .reduce import reduce_oo
from .validator import unmet_inputs, validate_oo

__all__ = [
    "GOAL_SERVICE",
    "INIT_SERVICE",
    "PRESENCE",
    "ConceptTree",
    "OOQuery",
    "OOService",
    "PartialConcept",
    "build_oo_problem",
    "partials_json",
    "EngineState",
    "call_web_service",
    "find_comp",
    "initialize",
    "reduce_oo",
    "unmet_inputs",
    "validate_oo",
]
