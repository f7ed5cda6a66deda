"""
Core package for composer.

Public API:
- intern / name_of
- Service, Request, Composition, ValidationReport
- validate_composition
- layer_composition
- brute_force_shortest
- load_instance / build_name_problem
"""

from .params import ParameterId, intern, intern_all, name_of, names_of
from .composition import (
    Composition,
    Repository,
    Request,
    Service,
    ValidationReport,
    Violation,
    index_services,
    layer_composition,
    validate_composition,
)
from .oracle import brute_force_shortest
from .schema import load_composition, load_instance, parse_instance
from .loader import build_name_problem, dump_name_instance

__all__ = [
    "ParameterId",
    "intern",
    "intern_all",
    "name_of",
    "names_of",
    "Composition",
    "Repository",
    "Request",
    "Service",
    "ValidationReport",
    "Violation",
    "index_services",
    "layer_composition",
    "validate_composition",
    "brute_force_shortest",
    "load_composition",
    "load_instance",
    "parse_instance",
    "build_name_problem",
    "dump_name_instance",
]
