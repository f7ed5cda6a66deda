"""
loader.py - Turns validated name-model wire objects into engine types.
"""

import logging
from typing import Dict, Tuple

from app.core.composition import Repository, Request, Service, index_services
from app.core.errors import InstanceError
from app.core.params import names_of
from app.core.schema import NameInstance, QuerySpec, ServiceSpec

logger = logging.getLogger(__name__)


def build_service(spec: ServiceSpec, disjoint: bool = True) -> Service:
    svc = Service.from_names(spec.name, spec.inputs, spec.outputs)
    if disjoint and svc.inputs & svc.outputs:
        overlap = ", ".join(names_of(svc.inputs & svc.outputs))
        raise InstanceError(f"Service {spec.name} lists {overlap} as both input and output")
    return svc


def build_request(spec: QuerySpec) -> Request:
    req = Request.from_names(spec.known, spec.required)
    if not req.goal:
        logger.warning("Query has an empty goal; every composition answers it")
    return req


def build_name_problem(instance: NameInstance) -> Tuple[Repository, Request]:
    repo: Dict[str, Service] = index_services(build_service(s) for s in instance.services)
    return repo, build_request(instance.query)


def dump_name_instance(repo: Repository, req: Request) -> Dict:
    """Inverse of build_name_problem; parameter lists come out sorted."""
    return {
        "model": "name",
        "services": [
            {"name": s.name, "in": names_of(s.inputs), "out": names_of(s.outputs)}
            for s in repo.values()
        ],
        "query": {"known": names_of(req.init), "required": names_of(req.goal)},
    }
