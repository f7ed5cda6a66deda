"""
search.py - Main composition loop for the relational model.

Each pass tries every service once (in declaration order) with an unseen
binding, then closes the knowledge under the rules. The loop ends when the
goal matches or a whole pass calls nothing.
"""

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple

from app.engine_relational.knowledge import (
    CallHistory, KnowledgeState, ObjectRef, Triple, binding_digest,
)
from app.engine_relational.matching import Matcher
from app.engine_relational.ontology import Ontology, RelQuery, RelService, Rule

logger = logging.getLogger(__name__)

DEFAULT_OBJECT_CAP = 4


@dataclass
class Step:
    kind: str  # "seed" | "service" | "rule"
    name: str
    bindings: Dict[str, str] = field(default_factory=dict)
    creates: Dict[str, str] = field(default_factory=dict)
    produced_triples: List[Triple] = field(default_factory=list)
    used_triples: List[Triple] = field(default_factory=list)
    internal: bool = False

    def to_json(self) -> Dict:
        if self.kind == "rule":
            data = {"rule": self.name, "bindings": dict(self.bindings)}
            if self.internal:
                data["internal"] = True
            return data
        return {"service": self.name, "bindings": dict(self.bindings), "creates": dict(self.creates)}


@dataclass
class RelComposition:
    steps: List[Step]
    explored_steps: int = 0

    @property
    def service_calls(self) -> List[Step]:
        return [s for s in self.steps if s.kind == "service"]

    @property
    def rule_applications(self) -> List[Step]:
        return [s for s in self.steps if s.kind == "rule" and not s.internal]

    def __len__(self) -> int:
        return len(self.service_calls)

    def to_json(self) -> Dict:
        return {"calls": [s.to_json() for s in self.steps]}


class RelationalEngine:
    """Owns one knowledge state and call history for a single search."""

    def __init__(self, onto: Ontology, ignore_rules: bool = False,
                 object_cap: int = DEFAULT_OBJECT_CAP, both_orientations: bool = False):
        self.onto = onto
        self.matcher = Matcher(onto, both_orientations)
        self.rules = onto.active_rules(ignore_rules)
        self.closure_rules = onto.property_rules()
        self.object_cap = object_cap
        self.K = KnowledgeState()
        self.history = CallHistory()
        self.ordinals: Counter = Counter()
        self.rounds: Counter = Counter()
        self.steps: List[Step] = []

    # ------------------------------------------------------------
    # Services
    # ------------------------------------------------------------

    def _over_cap(self, svc: RelService, binding: Dict[str, ObjectRef]) -> bool:
        if not svc.outputs:
            return False
        key = (svc.name, tuple(sorted(binding[p].type for p in svc.input_names)))
        if self.rounds[key] >= self.object_cap:
            logger.debug(f"Object cap reached for {svc.name} on {key[1]}")
            return True
        return False

    def find_match(self, svc: RelService) -> Optional[Dict[str, ObjectRef]]:
        return self.matcher.find_match(svc, self.K, self.history, skip=self._over_cap)

    def call_service(self, svc: RelService, binding: Dict[str, ObjectRef],
                     kind: str = "service") -> Step:
        """Create fresh output objects, instantiate effects, record the call."""
        self.ordinals[svc.name] += 1
        ordinal = self.ordinals[svc.name]
        ids = {p: obj.id for p, obj in binding.items()}
        step = Step(kind, svc.name, bindings=dict(ids))
        step.used_triples = [
            self.matcher.found_triple(self.K, rel, ids[a], ids[b]) for rel, a, b in svc.preconditions
        ]
        for param, concept in svc.outputs:
            obj_id = f"{svc.name}.{param}#{ordinal}"
            self.K.add_object(obj_id, concept)
            ids[param] = obj_id
            step.creates[param] = obj_id
        for rel, a, b in svc.effects:
            if self.K.add_triple(rel, ids[a], ids[b]):
                step.produced_triples.append((rel, ids[a], ids[b]))

        self.history.record(svc.name, binding_digest(binding[p].id for p in svc.input_names))
        if svc.outputs:
            self.rounds[(svc.name, tuple(sorted(binding[p].type for p in svc.input_names)))] += 1
        self.steps.append(step)
        logger.debug(f"Called {svc.name} with {step.bindings}")
        self.apply_inference_rules(self.closure_rules)
        return step

    # ------------------------------------------------------------
    # Rules
    # ------------------------------------------------------------

    def apply_inference_rules(self, rules: Optional[Sequence[Rule]] = None) -> int:
        """Fire unseen rule bindings until none adds a triple.

        Returns:
            number of applications that added at least one triple
        """
        rules = self.rules if rules is None else rules
        fired = 0
        changed = True
        while changed:
            changed = False
            for rule in rules:
                params = [(v, None) for v in rule.params]
                matches = list(self.matcher.iter_matches(params, rule.preconditions, self.K))
                for binding in matches:
                    digest = binding_digest(binding[v].id for v in rule.params)
                    if (rule.name, digest) in self.history:
                        continue
                    self.history.record(rule.name, digest)
                    ids = {v: o.id for v, o in binding.items()}
                    new = [(rel, ids[a], ids[b]) for rel, a, b in rule.effects
                           if self.K.add_triple(rel, ids[a], ids[b])]
                    if not new:
                        continue
                    step = Step("rule", rule.name, bindings=ids, produced_triples=new,
                                internal=rule.internal)
                    step.used_triples = [
                        self.matcher.found_triple(self.K, rel, ids[a], ids[b])
                        for rel, a, b in rule.preconditions
                    ]
                    self.steps.append(step)
                    fired += 1
                    changed = True
        return fired

    # ------------------------------------------------------------
    # Goal
    # ------------------------------------------------------------

    def goal_match(self, query: RelQuery) -> Optional[Dict[str, ObjectRef]]:
        goal = query.goal_service()
        return next(iter(self.matcher.iter_matches(goal.inputs, goal.preconditions, self.K)), None)


def prune_steps(steps: Sequence[Step], goal_objects: Set[str], goal_triples: Set[Triple]) -> List[Step]:
    """Backward walk keeping only steps whose products something later uses."""
    needed_objects = set(goal_objects)
    needed_triples = set(goal_triples)
    kept: List[Step] = []
    for step in reversed(steps):
        produces = (set(step.creates.values()) & needed_objects) or (set(step.produced_triples) & needed_triples)
        if step.kind == "seed" or produces:
            kept.append(step)
            needed_objects -= set(step.creates.values())
            needed_triples -= set(step.produced_triples)
            needed_objects |= set(step.bindings.values())
            needed_triples |= set(step.used_triples)
    kept.reverse()
    return kept


def search_composition_relational(onto: Ontology, repo: Sequence[RelService], query: RelQuery,
                                  ignore_rules: bool = False, object_cap: int = DEFAULT_OBJECT_CAP,
                                  both_orientations: bool = False) -> Optional[RelComposition]:
    """Run the pass loop and return the pruned composition, or None."""
    engine = RelationalEngine(onto, ignore_rules, object_cap, both_orientations)
    engine.call_service(query.input_service(), {}, kind="seed")
    engine.apply_inference_rules()

    passes = 0
    goal = engine.goal_match(query)
    while goal is None:
        passes += 1
        called = False
        for svc in repo:
            binding = engine.find_match(svc)
            if binding is not None:
                engine.call_service(svc, binding)
                called = True
        engine.apply_inference_rules()
        goal = engine.goal_match(query)
        if not called:
            break

    if goal is None:
        logger.info(f"Relational search idle after {passes} passes; goal unmatched")
        return None

    ids = {p: o.id for p, o in goal.items()}
    goal_triples = {engine.matcher.found_triple(engine.K, rel, ids[a], ids[b])
                    for rel, a, b in query.required_relations}
    kept = prune_steps(engine.steps, set(ids.values()), goal_triples)
    logger.info(f"Relational search: {passes} passes, {len(engine.steps)} steps, {len(kept)} kept")
    return RelComposition(kept, explored_steps=len(engine.steps))
