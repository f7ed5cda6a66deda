"""
pipeline.py - Model dispatch shared by the CLI and the bench harness.

solve_instance runs the engine matching an instance's model tag and always
re-validates the result with that model's independent checker.
"""

import logging
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from app.core.composition import Composition, layer_composition, validate_composition
from app.core.errors import InstanceError
from app.core.loader import build_name_problem
from app.core.params import names_of
from app.core.schema import AnyInstance, CallSpec, CompositionSpec
from app.engine_name.solver import solve_name
from app.engine_oo.engine import find_comp
from app.engine_oo.reduce import reduce_oo
from app.engine_oo.tree import build_oo_problem
from app.engine_oo.validator import unmet_inputs, validate_oo
from app.engine_relational.ontology import build_relational_problem
from app.engine_relational.search import DEFAULT_OBJECT_CAP, search_composition_relational
from app.engine_relational.validator import validate_relational
from app.taxonomy.engine import execution_path, find_composition_hierarchical, validate_hierarchical
from app.taxonomy.loader import build_hierarchical_problem

logger = logging.getLogger(__name__)


@dataclass
class SolveOptions:
    use_scores: bool = True
    reduce: bool = True          # name / hierarchical reduction
    oo_reduce: bool = False      # backward sweep for the object-oriented model
    ignore_rules: bool = False
    object_cap: int = DEFAULT_OBJECT_CAP
    both_orientations: bool = False
    max_rounds: Optional[int] = None


@dataclass
class SolveOutcome:
    model: str
    composition: Optional[Dict]
    length: int = 0
    execution_path: Optional[int] = None
    valid: bool = False
    solve_ms: float = 0.0
    extra: Dict = field(default_factory=dict)

    @property
    def solved(self) -> bool:
        return self.composition is not None


# ============================================================
# Solve
# ============================================================

def _timed(fn, *args, **kwargs):
    start = time.perf_counter()
    result = fn(*args, **kwargs)
    return result, (time.perf_counter() - start) * 1000.0


def solve_instance(instance: AnyInstance, opts: Optional[SolveOptions] = None) -> SolveOutcome:
    opts = opts or SolveOptions()
    model = instance.model

    if model == "name":
        repo, req = build_name_problem(instance)
        comp, ms = _timed(solve_name, repo, req, opts.use_scores, opts.reduce, opts.max_rounds)
        if comp is None:
            return SolveOutcome(model, None, solve_ms=ms)
        layered = layer_composition(repo, req, comp)
        report = validate_composition(repo, req, layered)
        return SolveOutcome(model, layered.to_json(), len(comp), len(layered.layers), report.valid, ms)

    if model == "hierarchical":
        repo, tax, req = build_hierarchical_problem(instance)
        comp, ms = _timed(find_composition_hierarchical, repo, tax, req, opts.use_scores, opts.reduce)
        if comp is None:
            return SolveOutcome(model, None, solve_ms=ms)
        report = validate_hierarchical(repo, tax, req, comp)
        return SolveOutcome(model, comp.to_json(), len(comp), execution_path(comp), report.valid, ms)

    if model == "relational":
        onto, services, query = build_relational_problem(instance)
        comp, ms = _timed(search_composition_relational, onto, services, query,
                          opts.ignore_rules, opts.object_cap, opts.both_orientations)
        if comp is None:
            return SolveOutcome(model, None, solve_ms=ms)
        data = comp.to_json()
        calls = [CallSpec.model_validate(c) for c in data["calls"]]
        replay = validate_relational(onto, services, query, calls, opts.both_orientations)
        extra = {
            "serviceCalls": len(comp.service_calls),
            "ruleApplications": len(comp.rule_applications),
            "exploredSteps": comp.explored_steps,
        }
        return SolveOutcome(model, data, len(comp), None, replay.valid, ms, extra)

    if model == "oo":
        tree, services, query = build_oo_problem(instance)
        comp, ms = _timed(find_comp, services, tree, query)
        if comp is None:
            return SolveOutcome(model, None, solve_ms=ms)
        if opts.oo_reduce:
            comp = reduce_oo(services, tree, query, comp)
        report = validate_oo(services, tree, query, comp)
        return SolveOutcome(model, comp.to_json(), len(comp), None, report.valid, ms)

    raise InstanceError(f"Unknown model tag: {model!r}")


# ============================================================
# Validate
# ============================================================

def _plain(spec: CompositionSpec) -> Composition:
    if any(not isinstance(c, str) for c in spec.calls):
        raise InstanceError("This model expects calls to be service names")
    try:
        if spec.layers is not None:
            return Composition(tuple(spec.calls), tuple(tuple(layer) for layer in spec.layers))
        return Composition.sequential(spec.calls)
    except ValueError as exc:
        raise InstanceError(f"Malformed composition: {exc}") from exc


def _report(valid: bool, goal_covered: bool, position: Optional[int] = None,
            service: Optional[str] = None, **details) -> Dict:
    data: Dict = {"valid": valid, "goalCovered": goal_covered}
    if position is not None:
        data["position"] = position
    if service is not None:
        data["service"] = service
    data.update({k: v for k, v in details.items() if v})
    return data


def check_composition(instance: AnyInstance, spec: CompositionSpec,
                      opts: Optional[SolveOptions] = None) -> Dict:
    """Validate a composition file against an instance; returns a JSON report.

    Unknown service names raise UnknownServiceError instead of producing a verdict.
    """
    opts = opts or SolveOptions()
    model = instance.model
    if model == "relational":
        onto, services, query = build_relational_problem(instance)
        calls: List[CallSpec] = [
            CallSpec(service=c) if isinstance(c, str) else c for c in spec.calls
        ]
        replay = validate_relational(onto, services, query, calls, opts.both_orientations)
        return _report(replay.valid, replay.goal_covered, replay.position, reason=replay.reason)

    comp = _plain(spec)
    if model == "name":
        repo, req = build_name_problem(instance)
        report = validate_composition(repo, req, comp)
    elif model == "hierarchical":
        repo, tax, req = build_hierarchical_problem(instance)
        report = validate_hierarchical(repo, tax, req, comp)
    elif model == "oo":
        tree, services, query = build_oo_problem(instance)
        report = validate_oo(services, tree, query, comp)
        if not report.valid:
            v = report.first_violation
            return _report(False, report.goal_covered, v.position if v else None,
                           v.service if v else None, unmet=unmet_inputs(services, tree, query, comp))
        return _report(True, True)
    else:
        raise InstanceError(f"Unknown model tag: {model!r}")

    v = report.first_violation
    return _report(
        report.valid, report.goal_covered,
        v.position if v else None, v.service if v else None,
        missing=names_of(v.missing) if v else [],
        missingGoal=names_of(report.missing_goal),
    )
