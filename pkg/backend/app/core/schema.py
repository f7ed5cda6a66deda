"""
schema.py - pydantic models for instance and composition files.

One model per instance tag; ``load_instance`` dispatches on the "model" field
and converts every parsing problem into InstanceError.
"""

import json
from pathlib import Path
from typing import Annotated, Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, ValidationError

from app.core.errors import InstanceError


class _Wire(BaseModel):
    model_config = ConfigDict(populate_by_name=True, extra="forbid")


# ============================================================
# Name model
# ============================================================

class ServiceSpec(_Wire):
    name: str = Field(..., min_length=1)
    inputs: List[str] = Field(default_factory=list, alias="in")
    outputs: List[str] = Field(default_factory=list, alias="out")


class QuerySpec(_Wire):
    known: List[str] = Field(default_factory=list)
    required: List[str] = Field(default_factory=list)


class NameInstance(_Wire):
    model: Literal["name"]
    services: List[ServiceSpec] = Field(default_factory=list)
    query: QuerySpec


# ============================================================
# Hierarchical model
# ============================================================

class ConceptSpec(_Wire):
    name: str = Field(..., min_length=1)
    parent: Optional[str] = None


class InstanceSpec(_Wire):
    name: str = Field(..., min_length=1)
    concept: str


class TaxonomySpec(_Wire):
    concepts: List[ConceptSpec] = Field(default_factory=list)
    instances: List[InstanceSpec] = Field(default_factory=list)


class HierarchicalInstance(_Wire):
    model: Literal["hierarchical"]
    taxonomy: TaxonomySpec
    services: List[ServiceSpec] = Field(default_factory=list)
    query: QuerySpec


# ============================================================
# Relational model
# ============================================================

class TypedParamSpec(_Wire):
    name: str = Field(..., min_length=1)
    type: str


class RelationSpec(_Wire):
    name: str = Field(..., min_length=1)
    transitive: bool = False
    symmetric: bool = False


class RuleSpec(_Wire):
    name: str = Field(..., min_length=1)
    params: List[str]
    pre: List[List[str]] = Field(default_factory=list)
    eff: List[List[str]] = Field(default_factory=list)


class RelServiceSpec(_Wire):
    name: str = Field(..., min_length=1)
    inputs: List[TypedParamSpec] = Field(default_factory=list, alias="in")
    outputs: List[TypedParamSpec] = Field(default_factory=list, alias="out")
    rel: List[List[str]] = Field(default_factory=list)


class RelQuerySpec(_Wire):
    known: List[TypedParamSpec] = Field(default_factory=list)
    required: List[TypedParamSpec] = Field(default_factory=list)
    known_rel: List[List[str]] = Field(default_factory=list, alias="knownRel")
    required_rel: List[List[str]] = Field(default_factory=list, alias="requiredRel")


class RelationalInstance(_Wire):
    model: Literal["relational"]
    taxonomy: TaxonomySpec
    relations: List[RelationSpec] = Field(default_factory=list)
    rules: List[RuleSpec] = Field(default_factory=list)
    services: List[RelServiceSpec] = Field(default_factory=list)
    query: RelQuerySpec


# ============================================================
# Object-oriented model
# ============================================================

class PropertySpec(_Wire):
    name: str = Field(..., min_length=1)
    type: str


class OOConceptSpec(_Wire):
    name: str = Field(..., min_length=1)
    parent: Optional[str] = None
    props: List[PropertySpec] = Field(default_factory=list)


class ConceptTreeSpec(_Wire):
    concepts: List[OOConceptSpec] = Field(default_factory=list)


class PartialConceptSpec(_Wire):
    concept: str
    props: List[str] = Field(default_factory=list)


class OOServiceSpec(_Wire):
    name: str = Field(..., min_length=1)
    inputs: List[PartialConceptSpec] = Field(default_factory=list, alias="in")
    outputs: List[PartialConceptSpec] = Field(default_factory=list, alias="out")


class OOQuerySpec(_Wire):
    known: List[PartialConceptSpec] = Field(default_factory=list)
    required: List[PartialConceptSpec] = Field(default_factory=list)


class OOInstance(_Wire):
    model: Literal["oo"]
    concept_tree: ConceptTreeSpec = Field(..., alias="conceptTree")
    services: List[OOServiceSpec] = Field(default_factory=list)
    query: OOQuerySpec


AnyInstance = Annotated[
    Union[NameInstance, HierarchicalInstance, RelationalInstance, OOInstance],
    Field(discriminator="model"),
]
_instance_adapter = TypeAdapter(AnyInstance)

MODELS = ("name", "hierarchical", "relational", "oo")


# ============================================================
# Compositions
# ============================================================

class CallSpec(_Wire):
    service: Optional[str] = None
    rule: Optional[str] = None
    bindings: Dict[str, str] = Field(default_factory=dict)
    creates: Dict[str, str] = Field(default_factory=dict)
    internal: bool = False


class CompositionSpec(_Wire):
    model_config = ConfigDict(populate_by_name=True, extra="ignore")

    calls: List[Union[str, CallSpec]] = Field(default_factory=list)
    layers: Optional[List[List[str]]] = None


# ============================================================
# Loading
# ============================================================

def parse_instance(data: Any) -> AnyInstance:
    if not isinstance(data, dict):
        raise InstanceError("Instance must be a JSON object")
    tag = data.get("model")
    if tag not in MODELS:
        raise InstanceError(f"Unknown model tag: {tag!r}")
    try:
        return _instance_adapter.validate_python(data)
    except ValidationError as exc:
        raise InstanceError(f"Invalid {tag} instance: {exc}") from exc


def read_json(path: Union[str, Path]) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        raise InstanceError(f"Cannot read {path}: {exc}") from exc


def load_instance(path: Union[str, Path]) -> AnyInstance:
    return parse_instance(read_json(path))


def load_composition(path: Union[str, Path]) -> CompositionSpec:
    try:
        return CompositionSpec.model_validate(read_json(path))
    except ValidationError as exc:
        raise InstanceError(f"Invalid composition file {path}: {exc}") from exc
