"""
composition.py - Name-model data types and the composition validator.

A composition is valid when every call's inputs are known before it runs
(from the request or from strictly earlier calls / layers) and the goal is
covered at the end.
"""

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from app.core.errors import DuplicateServiceError, UnknownServiceError
from app.core.params import ParameterId, intern_all


@dataclass(frozen=True)
class Service:
    name: str
    inputs: FrozenSet[ParameterId]
    outputs: FrozenSet[ParameterId]

    @classmethod
    def from_names(cls, name: str, inputs: Iterable[str], outputs: Iterable[str]) -> "Service":
        return cls(name, intern_all(inputs), intern_all(outputs))


@dataclass(frozen=True)
class Request:
    init: FrozenSet[ParameterId]
    goal: FrozenSet[ParameterId]

    @classmethod
    def from_names(cls, init: Iterable[str], goal: Iterable[str]) -> "Request":
        return cls(intern_all(init), intern_all(goal))


@dataclass(frozen=True)
class Composition:
    """Ordered calls, optionally grouped into parallel layers."""
    calls: Tuple[str, ...] = ()
    layers: Optional[Tuple[Tuple[str, ...], ...]] = None

    def __post_init__(self):
        if len(set(self.calls)) != len(self.calls):
            raise ValueError("Composition contains a duplicate service")
        if self.layers is not None:
            flat = tuple(name for layer in self.layers for name in layer)
            if flat != self.calls:
                raise ValueError("Layers do not reproduce the call order")

    def __len__(self) -> int:
        return len(self.calls)

    @classmethod
    def sequential(cls, calls: Sequence[str]) -> "Composition":
        return cls(tuple(calls))

    @classmethod
    def layered(cls, layers: Sequence[Sequence[str]]) -> "Composition":
        frozen = tuple(tuple(layer) for layer in layers if layer)
        return cls(tuple(n for layer in frozen for n in layer), frozen)

    def to_json(self) -> Dict:
        data: Dict = {"calls": list(self.calls)}
        if self.layers is not None:
            data["layers"] = [list(layer) for layer in self.layers]
            data["executionPath"] = len(self.layers)
        return data


@dataclass(frozen=True)
class Violation:
    position: int  # 1-based call index
    service: str
    missing: FrozenSet[ParameterId]


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    goal_covered: bool
    first_violation: Optional[Violation] = None
    missing_goal: FrozenSet[ParameterId] = field(default_factory=frozenset)


Repository = Mapping[str, Service]


def index_services(services: Iterable[Service]) -> Dict[str, Service]:
    """Build a name-keyed repository, rejecting duplicate names."""
    repo: Dict[str, Service] = {}
    for svc in services:
        if svc.name in repo:
            raise DuplicateServiceError(f"Duplicate service name: {svc.name}")
        repo[svc.name] = svc
    return repo


def resolve(repo: Repository, names: Iterable[str]) -> List[Service]:
    resolved = []
    for name in names:
        if name not in repo:
            raise UnknownServiceError(name)
        resolved.append(repo[name])
    return resolved


def validate_composition(repo: Repository, req: Request, comp: Composition) -> ValidationReport:
    """Check a composition against a request.

    Args:
        repo: name -> Service
        req: the request being answered
        comp: sequential or layered composition

    Returns:
        ValidationReport; the first violation records the 1-based position of
        the failing call and the inputs that were not yet known.

    Raises:
        UnknownServiceError: a call names a service missing from ``repo``
    """
    resolve(repo, comp.calls)
    groups = comp.layers if comp.layers is not None else tuple((name,) for name in comp.calls)

    known = set(req.init)
    violation: Optional[Violation] = None
    position = 0
    for group in groups:
        produced = set()
        for name in group:
            position += 1
            svc = repo[name]
            missing = svc.inputs - known
            if missing and violation is None:
                violation = Violation(position, name, frozenset(missing))
            produced |= svc.outputs
        known |= produced

    missing_goal = frozenset(req.goal - known)
    goal_covered = not missing_goal
    return ValidationReport(
        valid=violation is None and goal_covered,
        goal_covered=goal_covered,
        first_violation=violation,
        missing_goal=missing_goal,
    )


def layer_composition(repo: Repository, req: Request, comp: Composition) -> Composition:
    """Regroup a valid sequential composition into as-soon-as-possible layers.

    A call lands one layer after the latest of the earliest providers of its
    inputs; the order inside a layer follows the original order.
    """
    resolve(repo, comp.calls)
    provided_at: Dict[ParameterId, int] = {p: 0 for p in req.init}
    level: Dict[str, int] = {}
    for name in comp.calls:
        svc = repo[name]
        depth = 1 + max((provided_at.get(p, 0) for p in svc.inputs), default=0)
        level[name] = depth
        for p in svc.outputs:
            if depth < provided_at.get(p, depth + 1):
                provided_at[p] = depth
    if not level:
        return Composition.layered([])
    layers: List[List[str]] = [[] for _ in range(max(level.values()))]
    for name in comp.calls:
        layers[level[name] - 1].append(name)
    return Composition.layered(layers)
