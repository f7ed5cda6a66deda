"""
validator.py - Independent checker for object-oriented compositions.

Recomputes the known partial concepts with the merge formula directly
(every ancestor of an output receives the properties it has) and checks the
matching definition for every input.
"""

from collections import defaultdict
from typing import Dict, Optional, Sequence, Set

from app.core.composition import Composition, ValidationReport, Violation, resolve
from app.engine_oo.tree import ConceptTree, OOQuery, OOService, PartialConcept


def merge(known: Dict[str, Set[str]], outputs: Sequence[PartialConcept], tree: ConceptTree) -> None:
    for out in outputs:
        for anc in tree.ancestors(out.concept):
            known.setdefault(anc, set()).update(p for p in out.props if tree.has(anc, p))


def matches(known: Dict[str, Set[str]], pc: PartialConcept, tree: ConceptTree) -> bool:
    return any(
        pc.concept in tree.ancestors(c) and pc.props <= props
        for c, props in known.items()
    )


def validate_oo(repo: Sequence[OOService], tree: ConceptTree, query: OOQuery,
                comp: Composition) -> ValidationReport:
    services = {s.name: s for s in repo}
    resolve(services, comp.calls)
    known: Dict[str, Set[str]] = {}
    merge(known, query.known, tree)
    violation: Optional[Violation] = None
    for position, name in enumerate(comp.calls, start=1):
        svc = services[name]
        unmet = [pc for pc in svc.inputs if not matches(known, pc, tree)]
        if unmet and violation is None:
            violation = Violation(position, name, frozenset())
        merge(known, svc.outputs, tree)
    goal_ok = all(matches(known, pc, tree) for pc in query.required)
    return ValidationReport(valid=violation is None and goal_ok, goal_covered=goal_ok,
                            first_violation=violation)


def unmet_inputs(repo: Sequence[OOService], tree: ConceptTree, query: OOQuery,
                 comp: Composition) -> Dict[str, list]:
    """Per call, the partial concepts that did not match (diagnostics)."""
    services = {s.name: s for s in repo}
    known: Dict[str, Set[str]] = {}
    merge(known, query.known, tree)
    report: Dict[str, list] = defaultdict(list)
    for name in comp.calls:
        svc = services[name]
        for pc in svc.inputs:
            if not matches(known, pc, tree):
                report[name].append({"concept": pc.concept, "props": sorted(pc.props)})
        merge(known, svc.outputs, tree)
    return dict(report)
