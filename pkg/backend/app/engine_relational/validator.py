"""
validator.py - Replays a relational composition from an empty knowledge state.

Service calls must bind type-compatible existing objects satisfying every
precondition; rule steps must have their preconditions hold. Property closure
runs after every step, so internal closure steps are not replayed.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

from app.core.errors import UnknownServiceError
from app.core.schema import CallSpec
from app.engine_relational.knowledge import KnowledgeState
from app.engine_relational.ontology import INPUT_SERVICE, Ontology, RelQuery, RelService
from app.engine_relational.search import RelationalEngine

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ReplayReport:
    valid: bool
    goal_covered: bool
    position: Optional[int] = None  # 1-based step index
    reason: str = ""


def _fail(position: int, reason: str) -> ReplayReport:
    logger.debug(f"Replay failed at step {position}: {reason}")
    return ReplayReport(False, False, position, reason)


def validate_relational(onto: Ontology, repo: Sequence[RelService], query: RelQuery,
                        calls: Sequence[CallSpec], both_orientations: bool = False) -> ReplayReport:
    """Replay ``calls`` step by step; the report names the first failing step.

    Raises:
        UnknownServiceError: a call names a service the instance does not declare
    """
    services: Dict[str, RelService] = {s.name: s for s in repo}
    services[INPUT_SERVICE] = query.input_service()
    rules = {r.name: r for r in onto.rules}
    engine = RelationalEngine(onto, ignore_rules=True, both_orientations=both_orientations)
    K: KnowledgeState = engine.K
    seeded = False

    for position, call in enumerate(calls, start=1):
        if call.rule is not None:
            if call.internal:
                continue
            rule = rules.get(call.rule)
            if rule is None:
                return _fail(position, f"unknown rule {call.rule}")
            if set(call.bindings) != set(rule.params) or any(o not in K.objects for o in call.bindings.values()):
                return _fail(position, f"rule {rule.name} bindings incomplete")
            ids = call.bindings
            if not all(engine.matcher.holds(K, rel, ids[a], ids[b]) for rel, a, b in rule.preconditions):
                return _fail(position, f"rule {rule.name} preconditions do not hold")
            for rel, a, b in rule.effects:
                K.add_triple(rel, ids[a], ids[b])
            engine.apply_inference_rules(engine.closure_rules)
            continue

        svc = services.get(call.service or "")
        if svc is None:
            raise UnknownServiceError(call.service or "")
        if svc.name == INPUT_SERVICE:
            if seeded:
                return _fail(position, "user input replayed twice")
            seeded = True
        elif not seeded:
            return _fail(position, "service called before the user input")

        if set(call.bindings) != set(svc.input_names):
            return _fail(position, f"{svc.name} bindings do not cover its inputs")
        ids: Dict[str, str] = {}
        for param, concept in svc.inputs:
            obj = K.objects.get(call.bindings[param])
            if obj is None or not onto.taxonomy.is_subtype(obj.type, concept):
                return _fail(position, f"{svc.name}.{param} bound to an incompatible object")
            ids[param] = obj.id
        if not all(engine.matcher.holds(K, rel, ids[a], ids[b]) for rel, a, b in svc.preconditions):
            return _fail(position, f"{svc.name} preconditions do not hold")
        if set(call.creates) != {p for p, _ in svc.outputs}:
            return _fail(position, f"{svc.name} creates do not cover its outputs")
        for param, concept in svc.outputs:
            obj_id = call.creates[param]
            if obj_id in K.objects:
                return _fail(position, f"{svc.name} reuses object id {obj_id}")
            K.add_object(obj_id, concept)
            ids[param] = obj_id
        for rel, a, b in svc.effects:
            K.add_triple(rel, ids[a], ids[b])
        engine.apply_inference_rules(engine.closure_rules)

    if not seeded:
        engine.call_service(query.input_service(), {}, kind="seed")
    covered = engine.goal_match(query) is not None
    return ReplayReport(covered, covered, None, "" if covered else "goal does not match")
