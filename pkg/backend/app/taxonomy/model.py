"""
model.py - Concept forest, instances and the Euler-tour subsumption index.

subTypeOf is stored as parent pointers only. Transitivity comes from the
interval test: b is a descendant-or-self of a iff entry(a) <= entry(b) < exit(a).
"""

import logging
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional

from app.core.errors import TaxonomyError
from app.core.params import ParameterId, intern, name_of
from app.core.schema import TaxonomySpec

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EulerIndex:
    entry_time: Mapping[str, int]
    exit_time: Mapping[str, int]

    def is_subtype(self, sub: str, sup: str) -> bool:
        """True when ``sub`` is ``sup`` or lies below it."""
        return self.entry_time[sup] <= self.entry_time[sub] < self.exit_time[sup]


class Taxonomy:
    """Concepts with optional parent, plus instances attached to a concept."""

    def __init__(self, concepts: Mapping[str, Optional[str]],
                 instances: Optional[Mapping[ParameterId, str]] = None):
        self.parent: Dict[str, Optional[str]] = dict(concepts)
        self.concept_of: Dict[ParameterId, str] = dict(instances or {})
        for child, parent in self.parent.items():
            if parent is not None and parent not in self.parent:
                raise TaxonomyError(f"Concept {child} has undeclared parent {parent}")
        for inst, concept in self.concept_of.items():
            if concept not in self.parent:
                raise TaxonomyError(f"Instance {name_of(inst)} has undeclared concept {concept}")
        self.index = build_euler_index(self)

    @classmethod
    def from_spec(cls, spec: TaxonomySpec) -> "Taxonomy":
        concepts: Dict[str, Optional[str]] = {}
        for c in spec.concepts:
            if c.name in concepts:
                raise TaxonomyError(f"Concept declared twice: {c.name}")
            concepts[c.name] = c.parent
        instances: Dict[ParameterId, str] = {}
        for inst in spec.instances:
            pid = intern(inst.name)
            if pid in instances:
                raise TaxonomyError(f"Instance declared twice: {inst.name}")
            instances[pid] = inst.concept
        return cls(concepts, instances)

    def children(self) -> Dict[str, List[str]]:
        kids: Dict[str, List[str]] = defaultdict(list)
        for child, parent in self.parent.items():
            if parent is not None:
                kids[parent].append(child)
        return kids

    def roots(self) -> List[str]:
        return [c for c, p in self.parent.items() if p is None]

    def concept(self, instance: ParameterId) -> str:
        try:
            return self.concept_of[instance]
        except KeyError:
            raise TaxonomyError(f"Undeclared instance: {name_of(instance)}") from None

    def is_subtype(self, sub: str, sup: str) -> bool:
        return self.index.is_subtype(sub, sup)

    def subsumes(self, i1: ParameterId, i2: ParameterId) -> bool:
        """i1 can stand in for i2."""
        if i1 == i2:
            self.concept(i1)
            return True
        return self.index.is_subtype(self.concept(i1), self.concept(i2))

    def subsumes_set(self, p1: Iterable[ParameterId], p2: Iterable[ParameterId]) -> bool:
        """Every member of ``p2`` is subsumed by some member of ``p1``."""
        have = [self.concept(i) for i in set(p1)]
        for i2 in p2:
            target = self.concept(i2)
            if not any(self.index.is_subtype(c, target) for c in have):
                return False
        return True


def build_euler_index(tax: Taxonomy) -> EulerIndex:
    """Depth-first entry/exit numbering, roots in declaration order.

    Iterative so that deep chains do not hit the recursion limit.

    Raises:
        TaxonomyError: some concept is unreachable from every root (cycle)
    """
    kids = tax.children()
    entry: Dict[str, int] = {}
    exit_: Dict[str, int] = {}
    time = 0
    for root in tax.roots():
        stack = [(root, iter(kids.get(root, ())))]
        time += 1
        entry[root] = time
        while stack:
            node, it = stack[-1]
            child = next(it, None)
            if child is None:
                stack.pop()
                time += 1
                exit_[node] = time
                continue
            time += 1
            entry[child] = time
            stack.append((child, iter(kids.get(child, ()))))

    if len(entry) != len(tax.parent):
        stuck = sorted(c for c in tax.parent if c not in entry)
        raise TaxonomyError(f"Cycle in subTypeOf links involving: {', '.join(stuck[:5])}")
    logger.debug(f"Euler index over {len(entry)} concepts")
    return EulerIndex(entry, exit_)


def subsumes(tax: Taxonomy, i1: ParameterId, i2: ParameterId) -> bool:
    return tax.subsumes(i1, i2)


def subsumes_set(tax: Taxonomy, p1: Iterable[ParameterId], p2: Iterable[ParameterId]) -> bool:
    return tax.subsumes_set(p1, p2)
