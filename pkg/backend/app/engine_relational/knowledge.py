"""
knowledge.py - Objects, relation instances and the call history.
"""

import hashlib
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Set, Tuple

Triple = Tuple[str, str, str]  # (relation, subject id, object id)


@dataclass(frozen=True)
class ObjectRef:
    id: str
    type: str
    order: int  # creation rank, drives deterministic candidate order


@dataclass
class KnowledgeState:
    objects: Dict[str, ObjectRef] = field(default_factory=dict)
    triples: Set[Triple] = field(default_factory=set)
    forward: Dict[Tuple[str, str], Set[str]] = field(default_factory=lambda: defaultdict(set))
    backward: Dict[Tuple[str, str], Set[str]] = field(default_factory=lambda: defaultdict(set))

    def add_object(self, obj_id: str, concept: str) -> ObjectRef:
        if obj_id in self.objects:
            raise ValueError(f"Object id already present: {obj_id}")
        ref = ObjectRef(obj_id, concept, len(self.objects))
        self.objects[obj_id] = ref
        return ref

    def add_triple(self, relation: str, a: str, b: str) -> bool:
        """Returns False when the triple was already known."""
        triple = (relation, a, b)
        if triple in self.triples:
            return False
        if a not in self.objects or b not in self.objects:
            raise ValueError(f"Relation {relation}({a}, {b}) references an unknown object")
        self.triples.add(triple)
        self.forward[(relation, a)].add(b)
        self.backward[(relation, b)].add(a)
        return True

    def holds(self, relation: str, a: str, b: str) -> bool:
        return (relation, a, b) in self.triples

    def in_order(self, ids: Iterable[str]) -> List[ObjectRef]:
        return sorted((self.objects[i] for i in ids), key=lambda o: o.order)

    def all_objects(self) -> List[ObjectRef]:
        return list(self.objects.values())


class CallHistory:
    """Append-only digests of every binding already used, per service or rule."""

    def __init__(self):
        self._seen: Dict[str, Set[str]] = defaultdict(set)

    def __contains__(self, key: Tuple[str, str]) -> bool:
        name, digest = key
        return digest in self._seen.get(name, ())

    def record(self, name: str, digest: str) -> None:
        self._seen[name].add(digest)

    def count(self, name: str) -> int:
        return len(self._seen.get(name, ()))


def binding_digest(object_ids: Iterable[str]) -> str:
    """Digest of the bound object ids, in parameter order."""
    h = hashlib.blake2b(digest_size=16)
    for obj_id in object_ids:
        h.update(obj_id.encode("utf-8"))
        h.update(b"\x1f")
    return h.hexdigest()
