"""
loader.py - Hierarchical instance -> (repository, taxonomy, request).
"""

from typing import Tuple

from app.core.composition import Repository, Request, index_services
from app.core.errors import TaxonomyError
from app.core.loader import build_request, build_service
from app.core.params import name_of
from app.core.schema import HierarchicalInstance
from app.taxonomy.model import Taxonomy


def build_hierarchical_problem(instance: HierarchicalInstance) -> Tuple[Repository, Taxonomy, Request]:
    tax = Taxonomy.from_spec(instance.taxonomy)
    # Same instance may appear as input and output (e.g. a string rewriter).
    repo = index_services(build_service(s, disjoint=False) for s in instance.services)
    req = build_request(instance.query)
    for svc in repo.values():
        for inst in svc.inputs | svc.outputs:
            if inst not in tax.concept_of:
                raise TaxonomyError(f"Service {svc.name} uses undeclared instance {name_of(inst)}")
    for inst in req.init | req.goal:
        if inst not in tax.concept_of:
            raise TaxonomyError(f"Query uses undeclared instance {name_of(inst)}")
    return repo, tax, req
