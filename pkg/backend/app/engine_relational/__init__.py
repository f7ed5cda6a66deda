"""
Relational engine.

Public API:
- build_relational_problem
- Matcher (iter_matches / find_match)
- RelationalEngine (call_service / apply_inference_rules)
- search_composition_relational
- validate_relational
"""

from .knowledge import CallHistory, KnowledgeState, ObjectRef, binding_digest
from .ontology import (
    GOAL_SERVICE,
    INPUT_SERVICE,
    Ontology,
    RelationDecl,
    RelQuery,
    RelService,
    Rule,
    build_relational_problem,
)
from .matching import Matcher
from .search import (
    DEFAULT_OBJECT_CAP,
    RelComposition,
    RelationalEngine,
    Step,
    prune_steps,
    search_composition_relational,
)
from .validator import ReplayReport, validate_relational

__all__ = [
    "CallHistory",
    "KnowledgeState",
    "ObjectRef",
    "binding_digest",
    "GOAL_SERVICE",
    "INPUT_SERVICE",
    "Ontology",
    "RelationDecl",
    "RelQuery",
    "RelService",
    "Rule",
    "build_relational_problem",
    "Matcher",
    "DEFAULT_OBJECT_CAP",
    "RelComposition",
    "RelationalEngine",
    "Step",
    "prune_steps",
    "search_composition_relational",
    "ReplayReport",
    "validate_relational",
]
