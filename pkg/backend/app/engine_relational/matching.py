"""
matching.py - Backtracking search for objects matching a parameter list.

Parameters are bound depth-first in declaration order. A candidate survives
only if every relation between it and already-bound parameters holds.
"""

import logging
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from app.engine_relational.knowledge import CallHistory, KnowledgeState, ObjectRef, binding_digest
from app.engine_relational.ontology import Atom, Ontology, RelService

logger = logging.getLogger(__name__)


class Matcher:
    """Enumerates bindings for typed service inputs or untyped rule variables."""

    def __init__(self, onto: Ontology, both_orientations: bool = False):
        self.onto = onto
        self.both_orientations = both_orientations

    def two_way(self, relation: str) -> bool:
        return self.both_orientations or self.onto.is_symmetric(relation)

    def holds(self, K: KnowledgeState, relation: str, a: str, b: str) -> bool:
        if K.holds(relation, a, b):
            return True
        return self.two_way(relation) and K.holds(relation, b, a)

    def found_triple(self, K: KnowledgeState, relation: str, a: str, b: str):
        """The stored orientation that satisfied ``relation(a, b)``."""
        if K.holds(relation, a, b):
            return (relation, a, b)
        return (relation, b, a)

    def iter_matches(self, params: Sequence[Tuple[str, Optional[str]]], atoms: Sequence[Atom],
                     K: KnowledgeState) -> Iterator[Dict[str, ObjectRef]]:
        """Yield every complete binding, in depth-first order.

        Args:
            params: (name, concept) pairs; a None concept matches any object
            atoms: relations that must hold between bound parameters
            K: knowledge to match against
        """
        names = [p for p, _ in params]
        position = {p: i for i, p in enumerate(names)}
        # Atoms become checkable once their later endpoint is bound.
        checks: List[List[Atom]] = [[] for _ in names]
        for atom in atoms:
            _, a, b = atom
            checks[max(position[a], position[b])].append(atom)

        type_pools: Dict[Optional[str], List[ObjectRef]] = {}

        def pool(concept: Optional[str]) -> List[ObjectRef]:
            if concept not in type_pools:
                objs = K.all_objects()
                if concept is not None:
                    tax = self.onto.taxonomy
                    objs = [o for o in objs if tax.is_subtype(o.type, concept)]
                type_pools[concept] = objs
            return type_pools[concept]

        binding: Dict[str, ObjectRef] = {}

        def candidates(level: int) -> List[ObjectRef]:
            name, concept = params[level]
            for rel, a, b in checks[level]:
                # Narrow through the relation index when the other end is bound.
                if a == name and b != name and b in binding:
                    ids = set(K.backward.get((rel, binding[b].id), ()))
                    if self.two_way(rel):
                        ids |= K.forward.get((rel, binding[b].id), set())
                elif b == name and a != name and a in binding:
                    ids = set(K.forward.get((rel, binding[a].id), ()))
                    if self.two_way(rel):
                        ids |= K.backward.get((rel, binding[a].id), set())
                else:
                    continue
                objs = K.in_order(ids)
                if concept is not None:
                    tax = self.onto.taxonomy
                    objs = [o for o in objs if tax.is_subtype(o.type, concept)]
                return objs
            return pool(concept)

        def descend(level: int) -> Iterator[Dict[str, ObjectRef]]:
            if level == len(params):
                yield dict(binding)
                return
            name = names[level]
            for obj in candidates(level):
                binding[name] = obj
                if all(self.holds(K, rel, binding[a].id, binding[b].id) for rel, a, b in checks[level]):
                    yield from descend(level + 1)
                del binding[name]

        yield from descend(0)

    def find_match(self, svc: RelService, K: KnowledgeState, history: CallHistory,
                   skip=None) -> Optional[Dict[str, ObjectRef]]:
        """First binding of ``svc`` whose digest is not in ``history``.

        ``skip`` is an optional predicate rejecting otherwise valid bindings
        (used for the object cap).
        """
        for binding in self.iter_matches(svc.inputs, svc.preconditions, K):
            digest = binding_digest(binding[p].id for p in svc.input_names)
            if (svc.name, digest) in history:
                continue
            if skip is not None and skip(svc, binding):
                continue
            return binding
        return None
