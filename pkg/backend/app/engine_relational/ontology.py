"""
ontology.py - Concepts, relation declarations, rules and relational services.

Declared relation properties are compiled into internal rules so that
symmetry and transitivity go through the same fixpoint as user rules.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from app.core.errors import DuplicateServiceError, InstanceError, TaxonomyError
from app.core.schema import RelServiceSpec, RelationalInstance, RuleSpec, TypedParamSpec
from app.taxonomy.model import Taxonomy

logger = logging.getLogger(__name__)

Atom = Tuple[str, str, str]  # (relation, first endpoint, second endpoint)

INPUT_SERVICE = "userInput"
GOAL_SERVICE = "userGoal"


@dataclass(frozen=True)
class RelationDecl:
    name: str
    transitive: bool = False
    symmetric: bool = False


@dataclass(frozen=True)
class Rule:
    name: str
    params: Tuple[str, ...]
    preconditions: Tuple[Atom, ...]
    effects: Tuple[Atom, ...]
    internal: bool = False


@dataclass(frozen=True)
class RelService:
    name: str
    inputs: Tuple[Tuple[str, str], ...]
    outputs: Tuple[Tuple[str, str], ...]
    relations: Tuple[Atom, ...] = ()

    @property
    def input_names(self) -> Tuple[str, ...]:
        return tuple(p for p, _ in self.inputs)

    @property
    def preconditions(self) -> Tuple[Atom, ...]:
        ins = set(self.input_names)
        return tuple(r for r in self.relations if r[1] in ins and r[2] in ins)

    @property
    def effects(self) -> Tuple[Atom, ...]:
        ins = set(self.input_names)
        return tuple(r for r in self.relations if not (r[1] in ins and r[2] in ins))


@dataclass
class Ontology:
    taxonomy: Taxonomy
    relations: Dict[str, RelationDecl]
    rules: List[Rule] = field(default_factory=list)

    def property_rules(self) -> List[Rule]:
        compiled: List[Rule] = []
        for rel in self.relations.values():
            if rel.symmetric:
                compiled.append(Rule(f"{rel.name}~symmetric", ("X", "Y"),
                                     ((rel.name, "X", "Y"),), ((rel.name, "Y", "X"),), internal=True))
            if rel.transitive:
                compiled.append(Rule(f"{rel.name}~transitive", ("X", "Y", "Z"),
                                     ((rel.name, "X", "Y"), (rel.name, "Y", "Z")),
                                     ((rel.name, "X", "Z"),), internal=True))
        return compiled

    def active_rules(self, ignore_rules: bool = False) -> List[Rule]:
        internal = self.property_rules()
        return internal if ignore_rules else internal + list(self.rules)

    def is_symmetric(self, relation: str) -> bool:
        decl = self.relations.get(relation)
        return bool(decl and decl.symmetric)

    def check_type(self, concept: str, owner: str) -> None:
        if concept not in self.taxonomy.parent:
            raise TaxonomyError(f"{owner} uses undeclared concept {concept}")

    def check_atoms(self, atoms: Sequence[Sequence[str]], names: Sequence[str], owner: str) -> Tuple[Atom, ...]:
        allowed = set(names)
        out = []
        for atom in atoms:
            if len(atom) != 3:
                raise InstanceError(f"{owner}: relation entries need [relation, a, b], got {atom}")
            rel, a, b = atom
            if rel not in self.relations:
                raise InstanceError(f"{owner} uses undeclared relation {rel}")
            if a not in allowed or b not in allowed:
                raise InstanceError(f"{owner}: relation {rel}({a}, {b}) names an undeclared parameter")
            out.append((rel, a, b))
        return tuple(out)


@dataclass(frozen=True)
class RelQuery:
    known: Tuple[Tuple[str, str], ...]
    required: Tuple[Tuple[str, str], ...]
    known_relations: Tuple[Atom, ...] = ()
    required_relations: Tuple[Atom, ...] = ()

    def input_service(self) -> RelService:
        """Fictive service producing what the user already holds."""
        return RelService(INPUT_SERVICE, (), self.known, self.known_relations)

    def goal_service(self) -> RelService:
        """Fictive service whose inputs are the required objects."""
        return RelService(GOAL_SERVICE, self.required, (), self.required_relations)


def _typed(params: List[TypedParamSpec], onto: Ontology, owner: str) -> Tuple[Tuple[str, str], ...]:
    seen = set()
    out = []
    for p in params:
        if p.name in seen:
            raise InstanceError(f"{owner} declares parameter {p.name} twice")
        seen.add(p.name)
        onto.check_type(p.type, owner)
        out.append((p.name, p.type))
    return tuple(out)


def build_service(spec: RelServiceSpec, onto: Ontology) -> RelService:
    inputs = _typed(spec.inputs, onto, spec.name)
    outputs = _typed(spec.outputs, onto, spec.name)
    names = [p for p, _ in inputs] + [p for p, _ in outputs]
    if len(set(names)) != len(names):
        raise InstanceError(f"{spec.name} reuses a parameter name between inputs and outputs")
    return RelService(spec.name, inputs, outputs, onto.check_atoms(spec.rel, names, spec.name))


def build_rule(spec: RuleSpec, onto: Ontology) -> Rule:
    if len(set(spec.params)) != len(spec.params):
        raise InstanceError(f"Rule {spec.name} repeats a variable")
    pre = onto.check_atoms(spec.pre, spec.params, f"Rule {spec.name}")
    eff = onto.check_atoms(spec.eff, spec.params, f"Rule {spec.name}")
    return Rule(spec.name, tuple(spec.params), pre, eff)


def build_relational_problem(instance: RelationalInstance):
    """Returns (ontology, services in declaration order, query)."""
    tax = Taxonomy.from_spec(instance.taxonomy)
    relations: Dict[str, RelationDecl] = {}
    for r in instance.relations:
        if r.name in relations:
            raise InstanceError(f"Relation declared twice: {r.name}")
        relations[r.name] = RelationDecl(r.name, r.transitive, r.symmetric)
    onto = Ontology(tax, relations)
    onto.rules = [build_rule(r, onto) for r in instance.rules]

    services: List[RelService] = []
    seen = set()
    for spec in instance.services:
        if spec.name in seen or spec.name in (INPUT_SERVICE, GOAL_SERVICE):
            raise DuplicateServiceError(f"Duplicate or reserved service name: {spec.name}")
        seen.add(spec.name)
        services.append(build_service(spec, onto))

    q = instance.query
    known = _typed(q.known, onto, "query.known")
    required = _typed(q.required, onto, "query.required")
    query = RelQuery(
        known,
        required,
        onto.check_atoms(q.known_rel, [p for p, _ in known], "query.knownRel"),
        onto.check_atoms(q.required_rel, [p for p, _ in required], "query.requiredRel"),
    )
    logger.debug(f"Loaded {len(services)} relational services, {len(onto.rules)} rules")
    return onto, services, query
