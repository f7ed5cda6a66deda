"""
tree.py - Concept tree with inheritable properties and partial concepts.
"""

import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

from app.core.errors import DuplicateServiceError, TaxonomyError
from app.core.schema import OOInstance, PartialConceptSpec
from app.taxonomy.model import Taxonomy

logger = logging.getLogger(__name__)

# Pseudo-property every concept has; marks a concept as known at all.
PRESENCE = "*"

INIT_SERVICE = "Init"
GOAL_SERVICE = "Goal"


@dataclass(frozen=True)
class PartialConcept:
    concept: str
    props: FrozenSet[str]

    def demands(self) -> List[Tuple[str, str]]:
        if not self.props:
            return [(self.concept, PRESENCE)]
        return [(self.concept, p) for p in sorted(self.props)]


@dataclass(frozen=True)
class OOService:
    name: str
    inputs: Tuple[PartialConcept, ...]
    outputs: Tuple[PartialConcept, ...]


@dataclass(frozen=True)
class OOQuery:
    known: Tuple[PartialConcept, ...]
    required: Tuple[PartialConcept, ...]

    def init_service(self) -> OOService:
        return OOService(INIT_SERVICE, (), self.known)

    def goal_service(self) -> OOService:
        return OOService(GOAL_SERVICE, self.required, ())


class ConceptTree:
    """Single-inheritance forest; a property is visible on its definer and below."""

    def __init__(self, parents: Dict[str, Optional[str]], props: Dict[str, Dict[str, str]]):
        self.taxonomy = Taxonomy(parents)
        self.parent = self.taxonomy.parent
        self.definer: Dict[str, str] = {}
        self.prop_type: Dict[str, str] = {}
        for concept, declared in props.items():
            for name, ptype in declared.items():
                if name == PRESENCE:
                    raise TaxonomyError(f"Property name {PRESENCE!r} is reserved")
                if ptype not in self.parent:
                    raise TaxonomyError(f"Property {concept}.{name} has undeclared type {ptype}")
                other = self.definer.get(name)
                if other is None or self.taxonomy.is_subtype(other, concept):
                    self.definer[name] = concept
                    self.prop_type[name] = ptype
                elif not self.taxonomy.is_subtype(concept, other):
                    raise TaxonomyError(f"Property {name} declared on unrelated concepts {other} and {concept}")

    @classmethod
    def from_instance(cls, instance: OOInstance) -> "ConceptTree":
        parents: Dict[str, Optional[str]] = {}
        props: Dict[str, Dict[str, str]] = {}
        for c in instance.concept_tree.concepts:
            if c.name in parents:
                raise TaxonomyError(f"Concept {c.name} declared twice; multiple inheritance is not allowed")
            parents[c.name] = c.parent
            props[c.name] = {p.name: p.type for p in c.props}
        return cls(parents, props)

    def has(self, concept: str, prop: str) -> bool:
        if prop == PRESENCE:
            return True
        definer = self.definer.get(prop)
        return definer is not None and self.taxonomy.is_subtype(concept, definer)

    def properties(self, concept: str) -> FrozenSet[str]:
        return frozenset(p for p in self.definer if self.has(concept, p))

    def is_a(self, sub: str, sup: str) -> bool:
        return self.taxonomy.is_subtype(sub, sup)

    def ancestors(self, concept: str) -> List[str]:
        """Concept itself, then each parent up to the root."""
        chain = []
        node: Optional[str] = concept
        while node is not None:
            chain.append(node)
            node = self.parent[node]
        return chain

    def partial(self, spec: PartialConceptSpec, owner: str) -> PartialConcept:
        if spec.concept not in self.parent:
            raise TaxonomyError(f"{owner} uses undeclared concept {spec.concept}")
        props = frozenset(spec.props)
        for p in props:
            if not self.has(spec.concept, p):
                raise TaxonomyError(f"{owner}: {spec.concept} has no property {p}")
        return PartialConcept(spec.concept, props)


def build_oo_problem(instance: OOInstance):
    """Returns (tree, services in declaration order, query)."""
    tree = ConceptTree.from_instance(instance)
    services: List[OOService] = []
    seen = set()
    for s in instance.services:
        if s.name in seen or s.name in (INIT_SERVICE, GOAL_SERVICE):
            raise DuplicateServiceError(f"Duplicate or reserved service name: {s.name}")
        seen.add(s.name)
        services.append(OOService(
            s.name,
            tuple(tree.partial(p, s.name) for p in s.inputs),
            tuple(tree.partial(p, s.name) for p in s.outputs),
        ))
    query = OOQuery(
        tuple(tree.partial(p, "query.known") for p in instance.query.known),
        tuple(tree.partial(p, "query.required") for p in instance.query.required),
    )
    return tree, services, query


def partials_json(partials: Iterable[PartialConcept]) -> List[Dict]:
    return [{"concept": p.concept, "props": sorted(p.props)} for p in partials]
