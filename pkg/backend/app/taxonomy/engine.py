"""
engine.py - Layered composition search under subsumption matching.

Learning an output teaches every instance it subsumes. Only instances that
some service or the goal asks for matter, so each output is expanded once to
the needed instances above it and the search then runs on plain sets.
"""

import logging
from collections import defaultdict
from typing import Dict, FrozenSet, List, Optional, Set

from app.core.composition import (
    Composition, Repository, Request, Service, ValidationReport, Violation, resolve,
)
from app.core.params import ParameterId
from app.engine_name.scores import compute_scores
from app.taxonomy.model import Taxonomy

logger = logging.getLogger(__name__)


class Expander:
    """Maps an instance set to the needed instances it subsumes."""

    def __init__(self, tax: Taxonomy, needed: Set[ParameterId]):
        self.tax = tax
        self.needed_by_concept: Dict[str, Set[ParameterId]] = defaultdict(set)
        for inst in needed:
            self.needed_by_concept[tax.concept(inst)].add(inst)
        self._cache: Dict[str, FrozenSet[ParameterId]] = {}

    def covered_by(self, concept: str) -> FrozenSet[ParameterId]:
        hit = self._cache.get(concept)
        if hit is None:
            hit = frozenset(
                inst
                for target, insts in self.needed_by_concept.items()
                if self.tax.is_subtype(concept, target)
                for inst in insts
            )
            self._cache[concept] = hit
        return hit

    def expand(self, instances) -> FrozenSet[ParameterId]:
        out: Set[ParameterId] = set()
        for inst in instances:
            out |= self.covered_by(self.tax.concept(inst))
        return frozenset(out)


def expand_problem(repo: Repository, tax: Taxonomy, req: Request):
    needed: Set[ParameterId] = set(req.goal)
    for svc in repo.values():
        needed |= svc.inputs
    expander = Expander(tax, needed)
    expanded = {
        name: Service(name, svc.inputs, expander.expand(svc.outputs))
        for name, svc in repo.items()
    }
    return expanded, Request(expander.expand(req.init) | req.init, req.goal)


def _closure_layers(exp: Repository, req: Request, order: Dict[str, float]) -> Optional[List[List[str]]]:
    """Learn-everything-callable rounds until the goal is covered.

    A round takes every callable service that still adds something, in
    descending score then name order.
    """
    known: Set[ParameterId] = set(req.init)
    waiting: Dict[ParameterId, List[str]] = defaultdict(list)
    unknown: Dict[str, int] = {}
    ready: List[str] = []
    for name, svc in exp.items():
        missing = svc.inputs - known
        unknown[name] = len(missing)
        for p in missing:
            waiting[p].append(name)
        if not missing:
            ready.append(name)

    layers: List[List[str]] = []
    while not req.goal <= known:
        layer = [n for n in ready if not exp[n].outputs <= known]
        if not layer:
            return None
        layer.sort(key=lambda n: (-order.get(n, 0.0), n))
        ready = []
        learned: Set[ParameterId] = set()
        for name in layer:
            learned |= exp[name].outputs
        learned -= known
        known |= learned
        for p in learned:
            for name in waiting.pop(p, ()):
                unknown[name] -= 1
                if unknown[name] == 0:
                    ready.append(name)
        layers.append(layer)
    return layers


def _reduce_layers(exp: Repository, req: Request, layers: List[List[str]]) -> List[str]:
    """Backward relevance pass; inputs of a layer join the needed set only
    after the whole layer has been visited."""
    needed: Set[ParameterId] = set(req.goal - req.init)
    kept: List[str] = []
    for layer in reversed(layers):
        asks: Set[ParameterId] = set()
        for name in layer:
            svc = exp[name]
            if svc.outputs & needed:
                needed -= svc.outputs
                asks |= svc.inputs
                kept.append(name)
        needed |= asks - req.init
    kept.reverse()
    return kept


def find_composition_hierarchical(repo: Repository, tax: Taxonomy, req: Request,
                                  use_scores: bool = True, reduce: bool = True) -> Optional[Composition]:
    """Layered search; the number of layers is the minimal execution path.

    Returns:
        Layered Composition, or None when the closure stalls before the goal.
    """
    exp, exp_req = expand_problem(repo, tax, req)
    order = compute_scores(exp.values(), req.goal).service_score if use_scores else {}
    layers = _closure_layers(exp, exp_req, order)
    if layers is None:
        logger.info("Hierarchical closure stalled before covering the goal")
        return None
    logger.info(f"Closure reached the goal in {len(layers)} layers, {sum(map(len, layers))} services")

    if reduce:
        for _ in range(max(len(repo), 1)):
            kept = _reduce_layers(exp, exp_req, layers)
            size = sum(map(len, layers))
            # Layers are rebuilt from scratch over the surviving services.
            layers = _closure_layers({n: exp[n] for n in kept}, exp_req, order)
            if len(kept) == size:
                break
        logger.info(f"After reduction: {sum(map(len, layers))} services, path {len(layers)}")
    return Composition.layered(layers)


def execution_path(comp: Composition) -> int:
    if comp.layers is None:
        raise ValueError("Execution path needs a layered composition")
    return len(comp.layers)


def validate_hierarchical(repo: Repository, tax: Taxonomy, req: Request,
                          comp: Composition) -> ValidationReport:
    """Independent checker: per layer, subsumes_set(known, inputs)."""
    resolve(repo, comp.calls)
    groups = comp.layers if comp.layers is not None else tuple((n,) for n in comp.calls)
    known: Set[ParameterId] = set(req.init)
    violation: Optional[Violation] = None
    position = 0
    for group in groups:
        produced: Set[ParameterId] = set()
        for name in group:
            position += 1
            svc = repo[name]
            if violation is None and not tax.subsumes_set(known, svc.inputs):
                missing = frozenset(i for i in svc.inputs if not tax.subsumes_set(known, [i]))
                violation = Violation(position, name, missing)
            produced |= svc.outputs
        known |= produced
    missing_goal = frozenset(g for g in req.goal if not tax.subsumes_set(known, [g]))
    return ValidationReport(
        valid=violation is None and not missing_goal,
        goal_covered=not missing_goal,
        first_violation=violation,
        missing_goal=missing_goal,
    )
